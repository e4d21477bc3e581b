#include "gipeps/fermion.hpp"

#include <bit>
#include <functional>

#include "gipeps/tensors.hpp"

namespace gipeps {

namespace {

constexpr double kPrune = 1e-15;

int jw_sign(std::uint64_t mask, int mode) {
  const std::uint64_t below = mask & ((std::uint64_t(1) << mode) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

// Apply the fermionic factors of one term to a basis mask; returns false if
// the result vanishes.
bool apply_fermion_factors(const FermionTerm& term, std::uint64_t& mask, int& sign) {
  sign = 1;
  for (auto it = term.ops.rbegin(); it != term.ops.rend(); ++it) {
    const std::uint64_t bit = std::uint64_t(1) << it->first;
    if (it->second) {
      if (mask & bit) return false;
      sign *= jw_sign(mask, it->first);
      mask |= bit;
    } else {
      if (!(mask & bit)) return false;
      sign *= jw_sign(mask, it->first);
      mask &= ~bit;
    }
  }
  return true;
}

void prune(FermionState& s) {
  for (auto it = s.begin(); it != s.end();)
    it = (std::abs(it->second) < kPrune) ? s.erase(it) : std::next(it);
}

void prune(JointState& s) {
  for (auto it = s.begin(); it != s.end();)
    it = (std::abs(it->second) < kPrune) ? s.erase(it) : std::next(it);
}

}  // namespace

bool even_parity(const FockOperator& op) {
  for (const auto& t : op.terms)
    if (t.ops.size() % 2 != 0) return false;
  return true;
}

FockOperator remap_modes(const FockOperator& op, const std::vector<int>& mode_map) {
  FockOperator out = op;
  for (auto& t : out.terms)
    for (auto& [mode, dagger] : t.ops) mode = mode_map.at(mode);
  return out;
}

FockOperator multiply(const FockOperator& a, const FockOperator& b) {
  FockOperator out;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      FermionTerm t;
      t.coeff = ta.coeff * tb.coeff;
      t.ops = ta.ops;
      t.ops.insert(t.ops.end(), tb.ops.begin(), tb.ops.end());
      t.boson = ta.boson;
      for (const auto& [slot, m] : tb.boson) {
        auto it = t.boson.find(slot);
        if (it == t.boson.end())
          t.boson[slot] = m;
        else
          it->second = it->second * m;
      }
      out.terms.push_back(std::move(t));
    }
  return out;
}

FockOperator adjoint(const FockOperator& op) {
  FockOperator out;
  for (const auto& t : op.terms) {
    FermionTerm r;
    r.coeff = std::conj(t.coeff);
    for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) r.ops.push_back({it->first, !it->second});
    for (const auto& [slot, m] : t.boson) r.boson[slot] = m.adjoint();
    out.terms.push_back(std::move(r));
  }
  return out;
}

FockOperator quadratic(const std::vector<int>& modes, const Matrix& m) {
  FockOperator out;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) < kPrune) continue;
      FermionTerm t;
      t.coeff = m(i, j);
      t.ops = {{modes[i], true}, {modes[j], false}};
      out.terms.push_back(std::move(t));
    }
  return out;
}

std::uint64_t BosonSpaces::encode(const std::vector<int>& idx) const {
  std::uint64_t code = 0;
  for (size_t k = 0; k < dims.size(); ++k) code = code * dims[k] + idx[k];
  return code;
}

std::vector<int> BosonSpaces::decode(std::uint64_t code) const {
  std::vector<int> idx(dims.size());
  for (size_t k = dims.size(); k-- > 0;) {
    idx[k] = static_cast<int>(code % dims[k]);
    code /= dims[k];
  }
  return idx;
}

FermionState apply(const FockOperator& op, const FermionState& state) {
  FermionState out;
  for (const auto& t : op.terms) {
    if (!t.boson.empty())
      throw Error(Errc::NotApplicable, "operator carries bosonic factors");
    for (const auto& [mask, amp] : state) {
      std::uint64_t m = mask;
      int sign = 1;
      if (!apply_fermion_factors(t, m, sign)) continue;
      out[m] += t.coeff * double(sign) * amp;
    }
  }
  prune(out);
  return out;
}

JointState apply(const FockOperator& op, const JointState& state, const BosonSpaces& bosons) {
  JointState out;
  for (const auto& t : op.terms)
    for (const auto& [key, amp] : state) {
      std::uint64_t m = key.first;
      int sign = 1;
      if (!apply_fermion_factors(t, m, sign)) continue;
      // Expand the bosonic factors slot by slot.
      std::vector<std::pair<std::uint64_t, Complex>> partial = {
          {key.second, t.coeff * double(sign) * amp}};
      for (const auto& [slot, mat] : t.boson) {
        std::uint64_t stride = 1;
        for (size_t k = slot + 1; k < bosons.dims.size(); ++k) stride *= bosons.dims[k];
        std::vector<std::pair<std::uint64_t, Complex>> next;
        for (const auto& [code, a] : partial) {
          const int cur = static_cast<int>(code / stride % bosons.dims[slot]);
          for (int r = 0; r < bosons.dims[slot]; ++r) {
            const Complex v = mat(r, cur);
            if (std::abs(v) < kPrune) continue;
            next.push_back({code + std::uint64_t(r - cur) * stride, v * a});
          }
        }
        partial = std::move(next);
      }
      for (const auto& [code, a] : partial) out[{m, code}] += a;
    }
  prune(out);
  return out;
}

FockBasis fock_space(int n_modes, FockSector sector) {
  if (n_modes > 24) throw Error(Errc::TooLarge, "too many fermionic modes");
  if (sector == FockSector::Full && n_modes > 16)
    throw Error(Errc::TooLarge, "unrestricted Fock space too large; use a parity sector");
  FockBasis b;
  b.n_modes = n_modes;
  const std::uint64_t total = std::uint64_t(1) << n_modes;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const bool even = std::popcount(mask) % 2 == 0;
    if (sector == FockSector::Even && !even) continue;
    if (sector == FockSector::Odd && even) continue;
    b.index[mask] = static_cast<int>(b.states.size());
    b.states.push_back(mask);
  }
  return b;
}

Matrix realize(const FockOperator& op, const FockBasis& basis) {
  const int d = static_cast<int>(basis.states.size());
  Matrix out = Matrix::Zero(d, d);
  for (const auto& t : op.terms) {
    if (!t.boson.empty())
      throw Error(Errc::NotApplicable, "operator carries bosonic factors");
    for (int c = 0; c < d; ++c) {
      std::uint64_t m = basis.states[c];
      int sign = 1;
      if (!apply_fermion_factors(t, m, sign)) continue;
      auto it = basis.index.find(m);
      if (it == basis.index.end()) continue;  // leaves the chosen sector
      out(it->second, c) += t.coeff * double(sign);
    }
  }
  return out;
}

Matrix mode_matrix(int mode, bool dagger, const FockBasis& basis) {
  FockOperator op;
  op.terms.push_back({Complex(1.0), {{mode, dagger}}, {}});
  return realize(op, basis);
}

Matrix fock_rep(const std::vector<int>& modes, const Matrix& d, const FockBasis& basis) {
  std::map<int, int> position;
  for (size_t p = 0; p < modes.size(); ++p) position[modes[p]] = int(p);
  const int n = static_cast<int>(basis.states.size());
  Matrix out = Matrix::Zero(n, n);
  for (int c = 0; c < n; ++c) {
    FockOperator prod;
    prod.terms.push_back({Complex(1.0), {}, {}});
    for (int mode = 0; mode < basis.n_modes; ++mode) {
      if (!((basis.states[c] >> mode) & 1ull)) continue;
      FockOperator factor;
      auto pit = position.find(mode);
      if (pit == position.end()) {
        factor.terms.push_back({Complex(1.0), {{mode, true}}, {}});
      } else {
        for (size_t r = 0; r < modes.size(); ++r) {
          if (std::abs(d(r, pit->second)) < kPrune) continue;
          factor.terms.push_back({d(r, pit->second), {{modes[r], true}}, {}});
        }
      }
      prod = multiply(prod, factor);
    }
    FermionState image = apply(prod, {{0ull, Complex(1.0)}});
    for (const auto& [mask, amp] : image) out(basis.index.at(mask), c) = amp;
  }
  return out;
}

FockOperator fiducial_u1(int epsilon, const std::map<unsigned, Complex>& alpha) {
  if (epsilon != 1 && epsilon != -1)
    throw Error(Errc::Config, "vertex staggering sign must be +1 or -1");
  FockOperator out;
  for (const auto& [occ, a] : alpha) {
    if (std::abs(a) < kPrune) continue;
    auto bit = [&](int mode) { return static_cast<int>((occ >> mode) & 1u); };
    auto flux = [&](int leg) {
      return bit(U1VertexModes::plus(leg)) - bit(U1VertexModes::minus(leg));
    };
    const int q = epsilon * bit(U1VertexModes::psi);
    if (q + flux(0) + flux(3) != flux(1) + flux(2)) continue;  // l + d vs r + u
    FermionTerm t;
    t.coeff = a;
    for (int mode = 0; mode < U1VertexModes::count; ++mode)
      if (bit(mode)) t.ops.push_back({mode, true});
    out.terms.push_back(std::move(t));
  }
  return out;
}

namespace {

// Shared assembly for the spin backends: expand the amplitude tensor of the
// standard coupling chain into creation-operator strings, with one bracket
// of choices per slot (physical, then the four legs).
struct SlotChoice {
  Complex coeff{1.0, 0.0};
  std::vector<std::pair<int, bool>> ops;
};

FockOperator assemble_spin_fiducial(
    const AlphaMap& alpha, const std::vector<int>& phys_labels,
    const std::vector<int>& leg_labels,
    const std::function<std::vector<SlotChoice>(int slot, int label, int mi)>& bracket) {
  auto g = make_group(GroupId::su2());
  auto phys = make_vertex_space(g, phys_labels);
  auto leg_space = make_vertex_space(g, leg_labels);
  VirtualLeg leg{leg_space, {}};
  auto tensor = build_vertex_tensor(g, phys, {leg, leg, leg, leg}, Ordering::A, alpha);

  FockOperator out;
  for (const auto& [idx, value] : tensor.amplitudes) {
    std::vector<FermionTerm> partial(1);
    partial[0].coeff = value;
    for (int slot = 0; slot < 5; ++slot) {
      const auto& st = (slot == 0 ? phys : leg_space).basis[idx[slot]];
      auto choices = bracket(slot, st.irrep, st.m);
      std::vector<FermionTerm> next;
      for (const auto& p : partial)
        for (const auto& c : choices) {
          FermionTerm t = p;
          t.coeff *= c.coeff;
          t.ops.insert(t.ops.end(), c.ops.begin(), c.ops.end());
          next.push_back(std::move(t));
        }
      partial = std::move(next);
    }
    for (auto& t : partial)
      if (std::abs(t.coeff) >= kPrune) out.terms.push_back(std::move(t));
  }
  return out;
}

}  // namespace

FockOperator fiducial_su2(const AlphaMap& alpha, const std::array<Complex, 5>& tau) {
  auto bracket = [&](int slot, int label, int mi) -> std::vector<SlotChoice> {
    const int a = slot - 1;  // leg number for slots 1..4
    const int lo = slot == 0 ? Su2VertexModes::psi(0) : Su2VertexModes::leg(a, 0);
    const int hi = slot == 0 ? Su2VertexModes::psi(1) : Su2VertexModes::leg(a, 1);
    if (label == 0) {
      std::vector<SlotChoice> out = {{Complex(1.0), {}}};
      if (std::abs(tau[slot]) >= kPrune)
        out.push_back({tau[slot], {{hi, true}, {lo, true}}});  // a+^dag a-^dag
      return out;
    }
    return {{Complex(1.0), {{mi == 0 ? lo : hi, true}}}};
  };
  return assemble_spin_fiducial(alpha, {0, 1}, {0, 1}, bracket);
}

FockOperator fiducial_su2b(const AlphaMap& alpha, Complex tau_p) {
  auto bracket = [&](int slot, int label, int mi) -> std::vector<SlotChoice> {
    if (slot == 0) {
      if (label == 0) {
        std::vector<SlotChoice> out = {{Complex(1.0), {}}};
        if (std::abs(tau_p) >= kPrune)
          out.push_back({tau_p, {{Su2VertexModes::psi(1), true}, {Su2VertexModes::psi(0), true}}});
        return out;
      }
      return {{Complex(1.0), {{Su2VertexModes::psi(mi), true}}}};
    }
    const int a = slot - 1;
    if (label == 0) return {{Complex(1.0), {}}};
    if (label == 1) return {{Complex(1.0), {{Su2bVertexModes::half(a, mi), true}}}};
    // Integer spin: a hole over the filled triplet. The hole operator at
    // m is a signed annihilation at -m.
    SlotChoice c;
    c.coeff = (mi % 2 == 0) ? -1.0 : 1.0;  // (-1)^m with m = mi - 1
    c.ops.push_back({Su2bVertexModes::triplet(a, 2 - mi), false});
    for (int mp = 0; mp < 3; ++mp) c.ops.push_back({Su2bVertexModes::triplet(a, mp), true});
    return {c};
  };
  return assemble_spin_fiducial(alpha, {0, 1}, {0, 1, 2}, bracket);
}

FockOperator bond_projector(const std::vector<std::pair<int, int>>& pairs) {
  FockOperator out;
  out.terms.push_back({Complex(1.0), {}, {}});
  for (const auto& [first, second] : pairs) {
    FockOperator factor;
    factor.terms.push_back({Complex(1.0), {}, {}});
    factor.terms.push_back({Complex(1.0), {{first, true}, {second, true}}, {}});
    out = multiply(out, factor);
  }
  return out;
}

FockOperator gauge_fiducial(const FockOperator& op, const std::vector<GaugeSub>& subs) {
  std::map<int, std::pair<const GaugeSub*, int>> lookup;  // mode -> (rule, m index)
  for (const auto& s : subs)
    for (size_t mi = 0; mi < s.modes.size(); ++mi) lookup[s.modes[mi]] = {&s, int(mi)};

  FockOperator out;
  for (const auto& term : op.terms) {
    std::vector<FermionTerm> partial(1);
    partial[0].coeff = term.coeff;
    partial[0].boson = term.boson;
    for (const auto& [mode, dagger] : term.ops) {
      auto lit = lookup.find(mode);
      if (lit == lookup.end()) {
        for (auto& p : partial) p.ops.push_back({mode, dagger});
        continue;
      }
      if (!dagger)
        throw Error(Errc::NotApplicable,
                    "gauging is defined for creation operators on the outgoing links");
      const GaugeSub& s = *lit->second.first;
      const int mi = lit->second.second;
      std::vector<FermionTerm> next;
      for (const auto& p : partial)
        for (int n = 0; n < s.dim; ++n) {
          const Matrix& blk = s.blocks[mi * s.dim + n];
          FermionTerm t = p;
          t.ops.push_back({s.modes[n], true});
          auto bit = t.boson.find(s.slot);
          if (bit == t.boson.end())
            t.boson[s.slot] = blk;
          else
            bit->second = bit->second * blk;
          next.push_back(std::move(t));
        }
      partial = std::move(next);
    }
    for (auto& t : partial) out.terms.push_back(std::move(t));
  }
  return out;
}

Matrix sigma_z() {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 1.0;
  m(1, 2) = 1.0;
  return m;
}

Matrix sigma_minus() { return sigma_plus().adjoint(); }

}  // namespace gipeps
