#include "gipeps/lattice.hpp"

#include <functional>
#include <unsupported/Eigen/KroneckerProduct>

namespace gipeps {

namespace {

Matrix exp_i_herm(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases = (Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int symmetric_charge(int label, int order) { return label > order / 2 ? label - order : label; }

// Spin generator on a virtual leg, lifted over degeneracy copies.
Matrix su2_leg_generator(const VirtualLeg& leg, int axis) {
  Matrix out = Matrix::Zero(leg.dim(), leg.dim());
  int off = 0;
  for (const auto& ir : leg.space.irreps) {
    const int copies = leg.copies(ir.label);
    const Matrix j = su2_spin_matrices(ir.label)[axis];
    for (int m = 0; m < ir.dim; ++m)
      for (int n = 0; n < ir.dim; ++n)
        for (int c = 0; c < copies; ++c) out(off + m * copies + c, off + n * copies + c) = j(m, n);
    off += ir.dim * copies;
  }
  return out;
}

Matrix abelian_leg_charge(const VirtualLeg& leg, int order) {
  Vector diag(leg.dim());
  int i = 0;
  for (const auto& st : leg.states()) diag(i++) = double(symmetric_charge(st.irrep, order));
  return diag.asDiagonal();
}

Matrix abelian_link_charge(const LinkSpace& space, int order) {
  Vector diag(space.dim);
  for (int i = 0; i < space.dim; ++i) diag(i) = double(symmetric_charge(space.basis[i].irrep, order));
  return diag.asDiagonal();
}

}  // namespace

LatticeVertex lattice_vertex(const VertexTensor& t) {
  LatticeVertex out;
  out.physical = VirtualLeg{t.physical, {}};
  out.amplitudes = t.amplitudes;
  return out;
}

LatticeVertex lattice_vertex_with_pair_channel(const VertexTensor& t, Complex tau_p) {
  LatticeVertex out;
  out.physical = VirtualLeg{t.physical, {{0, 2}}};
  for (const auto& [idx, value] : t.amplitudes) {
    const auto& st = t.physical.basis[idx[0]];
    auto key = idx;
    if (st.irrep == 0) {
      key[0] = out.physical.index_of(0, 0, 0);
      out.amplitudes[key] += value;
      key[0] = out.physical.index_of(0, 0, 1);
      out.amplitudes[key] += tau_p * value;
    } else {
      key[0] = out.physical.index_of(st.irrep, st.m, 0);
      out.amplitudes[key] += value;
    }
  }
  return out;
}

int LatticeSpec::hlink_slot(int x, int y) const {
  if (boundary == Boundary::Open) {
    if (x < 0 || x >= lx - 1 || y < 0 || y >= ly) return -1;
    return sites() + y * (lx - 1) + x;
  }
  return sites() + ((y + ly) % ly) * lx + (x + lx) % lx;
}

int LatticeSpec::vlink_slot(int x, int y) const {
  if (boundary == Boundary::Open) {
    if (x < 0 || x >= lx || y < 0 || y >= ly - 1) return -1;
    return sites() + hlinks() + y * lx + x;
  }
  return sites() + hlinks() + ((y + ly) % ly) * lx + (x + lx) % lx;
}

LatticeState contract(const LatticeSpec& spec) {
  const int ns = spec.sites(), nh = spec.hlinks(), nv = spec.vlinks();
  if (int(spec.vertices.size()) != ns)
    throw Error(Errc::Config, "vertex tensor list does not match the lattice size");

  LatticeState out;
  for (const auto& v : spec.vertices) out.dims.push_back(v.physical.dim());
  for (int i = 0; i < nh + nv; ++i) out.dims.push_back(spec.link_physical.dim);

  double total = 1.0;
  for (int d : out.dims) total *= d;
  if (total > 1e6) throw Error(Errc::TooLarge, "physical dimension " + std::to_string(total));

  const int n_slots = int(out.dims.size());
  std::vector<long long> stride(n_slots);
  long long acc = 1;
  for (int i = n_slots - 1; i >= 0; --i) {
    stride[i] = acc;
    acc *= out.dims[i];
  }
  out.coefficients = Vector::Zero(acc);

  // Per-vertex sparse lookup by the four leg indices.
  using PList = std::vector<std::pair<int, Complex>>;
  std::vector<std::map<std::array<int, 4>, PList>> vlook(ns);
  for (int s = 0; s < ns; ++s)
    for (const auto& [idx, value] : spec.vertices[s].amplitudes)
      vlook[s][{idx[1], idx[2], idx[3], idx[4]}].push_back({idx[0], value});

  // Link amplitudes grouped by the pair of bond indices.
  std::vector<std::pair<std::array<int, 2>, PList>> lgroups;
  if (nh + nv > 0) {
    auto link = build_link_tensor(spec.group, spec.link_physical, spec.leg, spec.leg, spec.beta);
    std::map<std::array<int, 2>, PList> grouped;
    for (const auto& [idx, value] : link.amplitudes)
      grouped[{idx[1], idx[2]}].push_back({idx[0], value});
    for (auto& [ab, list] : grouped) lgroups.push_back({ab, std::move(list)});
  }

  const int trivial0 = spec.leg.index_of(0, 0, 0);
  std::vector<int> choice(nh + nv);  // index into lgroups per link
  std::vector<const PList*> slot_lists(n_slots);

  // Accumulate the product of the per-slot sparse lists into the state.
  auto emit = [&]() {
    std::function<void(int, long long, Complex)> rec = [&](int slot, long long base, Complex c) {
      if (slot == n_slots) {
        out.coefficients(base) += c;
        return;
      }
      for (const auto& [p, v] : *slot_lists[slot]) rec(slot + 1, base + p * stride[slot], c * v);
    };
    rec(0, 0, Complex(1.0));
  };

  std::function<void(int)> scan = [&](int li) {
    if (li == nh + nv) {
      // Resolve vertex leg indices from the chosen link bond pairs.
      for (int y = 0; y < spec.ly; ++y)
        for (int x = 0; x < spec.lx; ++x) {
          const int s = spec.vertex_slot(x, y);
          auto bond = [&](int slot, int end) {
            return slot < 0 ? trivial0 : lgroups[choice[slot - ns]].first[end];
          };
          const std::array<int, 4> legs = {
              bond(spec.hlink_slot(x - 1, y), 1), bond(spec.hlink_slot(x, y), 0),
              bond(spec.vlink_slot(x, y), 0), bond(spec.vlink_slot(x, y - 1), 1)};
          auto it = vlook[s].find(legs);
          if (it == vlook[s].end()) return;
          slot_lists[s] = &it->second;
        }
      for (int i = 0; i < nh + nv; ++i) slot_lists[ns + i] = &lgroups[choice[i]].second;
      emit();
      return;
    }
    for (int c = 0; c < int(lgroups.size()); ++c) {
      choice[li] = c;
      scan(li + 1);
    }
  };
  scan(0);

  if (out.coefficients.norm() == 0.0) throw Error(Errc::EmptyState, "all amplitudes vanish");
  return out;
}

GaugeOperator gauge_operator(const LatticeSpec& spec, int x, int y, const GroupElement& g) {
  GaugeOperator op;
  op.factors.push_back(
      {spec.vertex_slot(x, y), leg_theta(spec.vertices[spec.vertex_slot(x, y)].physical, Side::Right, g)});
  const Matrix left_adj = theta(spec.link_physical, Side::Left, g).adjoint();
  const Matrix right = theta(spec.link_physical, Side::Right, g);
  if (int s = spec.hlink_slot(x, y); s >= 0) op.factors.push_back({s, left_adj});
  if (int s = spec.vlink_slot(x, y); s >= 0) op.factors.push_back({s, left_adj});
  if (int s = spec.hlink_slot(x - 1, y); s >= 0) op.factors.push_back({s, right});
  if (int s = spec.vlink_slot(x, y - 1); s >= 0) op.factors.push_back({s, right});
  return op;
}

Vector apply_product(const LatticeState& state, const SlotFactors& factors) {
  Vector v = state.coefficients;
  for (const auto& [slot, m] : factors) v = apply_slot(v, state.dims, slot, m);
  return v;
}

Vector apply_sum(const LatticeState& state, const SlotFactors& terms) {
  Vector v = Vector::Zero(state.coefficients.size());
  for (const auto& [slot, m] : terms) v += apply_slot(state.coefficients, state.dims, slot, m);
  return v;
}

double check_local_invariance(const LatticeState& state, const LatticeSpec& spec, int x, int y,
                              const GroupElement& g) {
  const auto op = gauge_operator(spec, x, y, g);
  return (apply_product(state, op.factors) - state.coefficients).norm() /
         state.coefficients.norm();
}

std::vector<SlotFactors> gauss_generators(const LatticeSpec& spec, int x, int y) {
  const auto kind = spec.group->id().kind;
  if (kind == GroupKind::SymmetricS3)
    throw Error(Errc::NotApplicable, "no generator form for a non-abelian finite group");

  const int vslot = spec.vertex_slot(x, y);
  const auto& phys = spec.vertices[vslot].physical;
  std::vector<SlotFactors> gens;

  if (kind == GroupKind::SU2) {
    const auto link_gen = su2_generators(spec.link_physical);
    for (int axis = 0; axis < 3; ++axis) {
      SlotFactors terms;
      terms.push_back({vslot, su2_leg_generator(phys, axis)});
      if (int s = spec.hlink_slot(x, y); s >= 0) terms.push_back({s, -link_gen.l[axis]});
      if (int s = spec.vlink_slot(x, y); s >= 0) terms.push_back({s, -link_gen.l[axis]});
      if (int s = spec.hlink_slot(x - 1, y); s >= 0) terms.push_back({s, link_gen.r[axis]});
      if (int s = spec.vlink_slot(x, y - 1); s >= 0) terms.push_back({s, link_gen.r[axis]});
      gens.push_back(std::move(terms));
    }
    return gens;
  }

  const int order = spec.group->order();
  const Matrix e = abelian_link_charge(spec.link_physical, order);
  SlotFactors terms;
  terms.push_back({vslot, abelian_leg_charge(phys, order)});
  if (int s = spec.hlink_slot(x, y); s >= 0) terms.push_back({s, -e});
  if (int s = spec.vlink_slot(x, y); s >= 0) terms.push_back({s, -e});
  if (int s = spec.hlink_slot(x - 1, y); s >= 0) terms.push_back({s, e});
  if (int s = spec.vlink_slot(x, y - 1); s >= 0) terms.push_back({s, e});
  gens.push_back(std::move(terms));
  return gens;
}

GaugeOperator exp_generators(const std::vector<SlotFactors>& gens, const std::array<double, 3>& q) {
  std::map<int, Matrix> accum;
  for (size_t a = 0; a < gens.size(); ++a)
    for (const auto& [slot, m] : gens[a]) {
      auto it = accum.find(slot);
      if (it == accum.end())
        accum[slot] = q[a] * m;
      else
        it->second += q[a] * m;
    }
  GaugeOperator op;
  for (const auto& [slot, h] : accum) op.factors.push_back({slot, exp_i_herm(h)});
  return op;
}

// --- fermionic lattices --------------------------------------------------

namespace {

FockOperator filter_and_remap(const FockOperator& op, const std::vector<int>& mode_map) {
  FockOperator out;
  for (const auto& t : op.terms) {
    FermionTerm r = t;
    bool keep = true;
    for (auto& [mode, dag] : r.ops) {
      if (mode_map[mode] < 0) {
        keep = false;  // touches a dangling leg: removed by the boundary projection
        break;
      }
      mode = mode_map[mode];
    }
    if (keep) out.terms.push_back(std::move(r));
  }
  return out;
}

}  // namespace

FermAssembly assemble_ferm_u1(const FermU1Spec& spec, bool gauged) {
  const int lx = spec.lx, ly = spec.ly, ns = lx * ly;
  if (int(spec.eps.size()) != ns || int(spec.alpha.size()) != ns)
    throw Error(Errc::Config, "per-site data does not match the lattice size");
  const int nh = (lx - 1) * ly, nv = lx * (ly - 1);
  auto hslot = [&](int x, int y) { return y * (lx - 1) + x; };
  auto vslot = [&](int x, int y) { return nh + y * lx + x; };

  // Rishon modes: two per internal leg end, after the matter modes.
  std::vector<std::array<std::array<int, 2>, 4>> rishon(
      ns, {{{-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}}});
  int next = ns;
  for (int s = 0; s < ns; ++s) {
    const int x = s % lx, y = s / lx;
    const std::array<bool, 4> internal = {x > 0, x < lx - 1, y < ly - 1, y > 0};
    for (int leg = 0; leg < 4; ++leg)
      if (internal[leg]) {
        rishon[s][leg] = {next, next + 1};
        next += 2;
      }
  }

  FermAssembly out;
  out.n_sites = ns;
  if (gauged) out.links.dims.assign(nh + nv, 3);
  std::vector<int> vac(out.links.dims.size(), 1);  // zero field
  JointState st = {{{0ull, out.links.encode(vac)}, Complex(1.0)}};

  for (int s = 0; s < ns; ++s) {
    std::vector<int> mode_map(U1VertexModes::count, -1);
    mode_map[U1VertexModes::psi] = s;
    for (int leg = 0; leg < 4; ++leg) {
      mode_map[U1VertexModes::plus(leg)] = rishon[s][leg][0];
      mode_map[U1VertexModes::minus(leg)] = rishon[s][leg][1];
    }
    auto op = filter_and_remap(fiducial_u1(spec.eps[s], spec.alpha[s]), mode_map);
    if (gauged) {
      const int x = s % lx, y = s / lx;
      std::vector<GaugeSub> subs;
      if (x < lx - 1) {
        subs.push_back({hslot(x, y), 1, {rishon[s][1][0]}, {sigma_plus()}});
        subs.push_back({hslot(x, y), 1, {rishon[s][1][1]}, {sigma_minus()}});
      }
      if (y < ly - 1) {
        subs.push_back({vslot(x, y), 1, {rishon[s][2][0]}, {sigma_plus()}});
        subs.push_back({vslot(x, y), 1, {rishon[s][2][1]}, {sigma_minus()}});
      }
      op = gauge_fiducial(op, subs);
    }
    st = apply(op, st, out.links);
  }

  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx - 1; ++x) {
      const int a = y * lx + x, b = a + 1;
      st = apply(adjoint(bond_projector({{rishon[b][0][0], rishon[a][1][0]},
                                         {rishon[b][0][1], rishon[a][1][1]}})),
                 st, out.links);
    }
  for (int y = 0; y < ly - 1; ++y)
    for (int x = 0; x < lx; ++x) {
      const int a = y * lx + x, b = a + lx;
      st = apply(adjoint(bond_projector({{rishon[b][3][0], rishon[a][2][0]},
                                         {rishon[b][3][1], rishon[a][2][1]}})),
                 st, out.links);
    }

  for (const auto& [key, v] : st)
    if ((key.first >> ns) == 0ull) out.physical[key] = v;
  if (out.physical.empty()) throw Error(Errc::EmptyState, "all amplitudes vanish");
  return out;
}

FermAssembly assemble_ferm_su2_pair(const std::array<AlphaMap, 2>& alpha,
                                    const std::array<std::array<Complex, 5>, 2>& tau,
                                    bool gauged) {
  auto g = make_group(GroupId::su2());
  FermAssembly out;
  out.n_sites = 2;  // two spin-1/2 matter modes per site: bits 0..3
  if (gauged) out.links.dims = {5};

  // Global modes: matter {0,1} and {2,3}, right rishons {4,5}, left {6,7}.
  std::vector<int> map0(Su2VertexModes::count, -1), map1(Su2VertexModes::count, -1);
  map0[Su2VertexModes::psi(0)] = 0;
  map0[Su2VertexModes::psi(1)] = 1;
  map0[Su2VertexModes::leg(1, 0)] = 4;
  map0[Su2VertexModes::leg(1, 1)] = 5;
  map1[Su2VertexModes::psi(0)] = 2;
  map1[Su2VertexModes::psi(1)] = 3;
  map1[Su2VertexModes::leg(0, 0)] = 6;
  map1[Su2VertexModes::leg(0, 1)] = 7;

  auto op0 = filter_and_remap(fiducial_su2(alpha[0], tau[0]), map0);
  auto op1 = filter_and_remap(fiducial_su2(alpha[1], tau[1]), map1);
  if (gauged) {
    auto space = make_link_space(g, std::vector<int>{0, 1});
    auto u = link_operator_u(space, 1);
    op0 = gauge_fiducial(op0, {{0, 2, {4, 5}, u.blocks}});
  }

  std::vector<int> vac(out.links.dims.size(), 0);  // the trivial sector leads
  JointState st = {{{0ull, out.links.encode(vac)}, Complex(1.0)}};
  st = apply(op0, st, out.links);
  st = apply(op1, st, out.links);
  st = apply(adjoint(bond_projector({{6, 4}, {7, 5}})), st, out.links);

  for (const auto& [key, v] : st)
    if ((key.first >> 4) == 0ull) out.physical[key] = v;
  if (out.physical.empty()) throw Error(Errc::EmptyState, "all amplitudes vanish");
  return out;
}

double tunneling_invariance(std::shared_ptr<const Group> group, const std::vector<int>& truncation,
                            int matter_label, int samples, std::uint64_t seed, bool transpose_u) {
  const int d = group->irrep(matter_label).dim;
  auto basis = fock_space(2 * d);
  auto space = make_link_space(group, truncation);
  auto u = link_operator_u(space, matter_label);
  const int fd = int(basis.states.size());

  Matrix t = Matrix::Zero(fd * space.dim, fd * space.dim);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      FockOperator hop;
      hop.terms.push_back({Complex(1.0), {{m, true}, {d + n, false}}, {}});
      const Matrix blk = transpose_u ? u.block(m, n).transpose() : u.block(m, n);
      t += Eigen::kroneckerProduct(realize(hop, basis), blk).eval();
    }
  const Matrix th = t + t.adjoint();

  std::vector<int> modes0(d), modes1(d);
  for (int i = 0; i < d; ++i) {
    modes0[i] = i;
    modes1[i] = d + i;
  }
  double res = 0.0;
  for (const auto& g : group->sample_elements(samples, seed)) {
    const Matrix dg = group->wigner_d(matter_label, g);
    const Matrix th0 =
        Eigen::kroneckerProduct(fock_rep(modes0, dg, basis), theta(space, Side::Left, g).adjoint());
    const Matrix th1 =
        Eigen::kroneckerProduct(fock_rep(modes1, dg, basis), theta(space, Side::Right, g));
    res = std::max(res, (th0 * th - th * th0).cwiseAbs().maxCoeff());
    res = std::max(res, (th1 * th - th * th1).cwiseAbs().maxCoeff());
  }
  return res;
}

}  // namespace gipeps
