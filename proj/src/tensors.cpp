#include "gipeps/tensors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace gipeps {

namespace {

constexpr double kPrune = 1e-15;

bool contains(const std::vector<int>& v, int x) {
  for (int y : v)
    if (y == x) return true;
  return false;
}

long long product(const std::vector<int>& dims) {
  long long p = 1;
  for (int d : dims) p *= d;
  return p;
}

}  // namespace

int VirtualLeg::copies(int label) const {
  auto it = degeneracy.find(label);
  if (it == degeneracy.end()) return 1;
  if (it->second < 1) throw Error(Errc::Config, "degeneracy counts must be positive");
  return it->second;
}

int VirtualLeg::dim() const {
  int d = 0;
  for (const auto& r : space.irreps) d += r.dim * copies(r.label);
  return d;
}

int VirtualLeg::index_of(int label, int m, int deg) const {
  int off = 0;
  for (const auto& r : space.irreps) {
    const int c = copies(r.label);
    if (r.label == label) {
      if (m < 0 || m >= r.dim || deg < 0 || deg >= c)
        throw Error(Errc::UnknownLabel, "leg index out of range");
      return off + m * c + deg;
    }
    off += r.dim * c;
  }
  throw Error(Errc::UnknownLabel, "irrep label not present on this leg");
}

std::vector<VirtualLeg::State> VirtualLeg::states() const {
  std::vector<State> out;
  for (const auto& r : space.irreps)
    for (int m = 0; m < r.dim; ++m)
      for (int i = 0; i < copies(r.label); ++i) out.push_back({r.label, m, i});
  return out;
}

bool same_leg(const VirtualLeg& a, const VirtualLeg& b) {
  if (a.space.irreps.size() != b.space.irreps.size()) return false;
  for (size_t k = 0; k < a.space.irreps.size(); ++k) {
    const int la = a.space.irreps[k].label;
    if (la != b.space.irreps[k].label) return false;
    if (a.copies(la) != b.copies(la)) return false;
  }
  return a.space.group->id().kind == b.space.group->id().kind &&
         a.space.group->id().order == b.space.group->id().order;
}

Matrix leg_theta(const VirtualLeg& leg, Side side, const GroupElement& g) {
  const int dim = leg.dim();
  Matrix out = Matrix::Zero(dim, dim);
  int off = 0;
  for (const auto& r : leg.space.irreps) {
    Matrix d = leg.space.group->wigner_d(r.label, g);
    if (side == Side::Left) d.transposeInPlace();
    const int c = leg.copies(r.label);
    Matrix block = Eigen::kroneckerProduct(d, Matrix::Identity(c, c));
    out.block(off, off, r.dim * c, r.dim * c) = block;
    off += r.dim * c;
  }
  return out;
}

Vector apply_slot(const Vector& v, const std::vector<int>& dims, int slot, const Matrix& m) {
  const int d = dims[slot];
  long long inner = 1;
  for (size_t k = slot + 1; k < dims.size(); ++k) inner *= dims[k];
  const long long outer = product(dims) / (d * inner);
  Vector out = Vector::Zero(v.size());
  for (long long o = 0; o < outer; ++o)
    for (long long i = 0; i < inner; ++i) {
      const long long base = o * d * inner + i;
      for (int r = 0; r < d; ++r) {
        Complex acc = 0.0;
        for (int c = 0; c < d; ++c) acc += m(r, c) * v(base + c * inner);
        out(base + r * inner) = acc;
      }
    }
  return out;
}

VertexTensor build_vertex_tensor(std::shared_ptr<const Group> group, const VertexSpace& physical,
                                 const VertexLegs& legs, Ordering ordering,
                                 const AlphaMap& params) {
  VertexTensor t;
  t.group = group;
  t.physical = physical;
  t.legs = legs;
  t.ordering = ordering;
  t.params = params;

  std::map<std::pair<int, int>, CGTable> cg_cache;
  auto cg = [&](int a, int b) -> const CGTable& {
    auto key = std::make_pair(a, b);
    auto it = cg_cache.find(key);
    if (it == cg_cache.end()) it = cg_cache.emplace(key, group->clebsch_gordan(a, b)).first;
    return it->second;
  };

  for (const auto& [key, alpha] : params) {
    // Validate the fusion path of the chosen coupling order.
    bool ok = false;
    switch (ordering) {
      case Ordering::A:
        ok = contains(group->fusion(key.jl, key.jd), key.j1) &&
             contains(group->fusion(key.j1, key.jp), key.j2);
        break;
      case Ordering::ATilde:
        ok = contains(group->fusion(key.jd, key.jp), key.j1) &&
             contains(group->fusion(key.jl, key.j1), key.j2);
        break;
      case Ordering::AHat:
        ok = contains(group->fusion(key.jl, key.jp), key.j1) &&
             contains(group->fusion(key.j1, key.jd), key.j2);
        break;
    }
    if (!ok || !contains(group->fusion(key.jr, key.ju), key.j2))
      throw Error(Errc::InadmissibleFusionKey,
                  "parameter keyed by a fusion-forbidden channel");

    const int dl = group->irrep(key.jl).dim, dr = group->irrep(key.jr).dim;
    const int du = group->irrep(key.ju).dim, dd = group->irrep(key.jd).dim;
    const int dp = group->irrep(key.jp).dim;
    const int d1 = group->irrep(key.j1).dim, d2 = group->irrep(key.j2).dim;
    const CGTable& cg_close = cg(key.jr, key.ju);

    for (int ml = 0; ml < dl; ++ml)
      for (int md = 0; md < dd; ++md)
        for (int mp = 0; mp < dp; ++mp) {
          // First two factors of the chain, contracted over m1, as a
          // function of m2.
          std::vector<double> chain(d2, 0.0);
          for (int m1 = 0; m1 < d1; ++m1)
            for (int m2 = 0; m2 < d2; ++m2) {
              double v = 0.0;
              switch (ordering) {
                case Ordering::A:
                  v = cg(key.jl, key.jd).coeff(ml, md, key.j1, m1) *
                      cg(key.j1, key.jp).coeff(m1, mp, key.j2, m2);
                  break;
                case Ordering::ATilde:
                  v = cg(key.jd, key.jp).coeff(md, mp, key.j1, m1) *
                      cg(key.jl, key.j1).coeff(ml, m1, key.j2, m2);
                  break;
                case Ordering::AHat:
                  v = cg(key.jl, key.jp).coeff(ml, mp, key.j1, m1) *
                      cg(key.j1, key.jd).coeff(m1, md, key.j2, m2);
                  break;
              }
              chain[m2] += v;
            }
          for (int mr = 0; mr < dr; ++mr)
            for (int mu = 0; mu < du; ++mu) {
              double close = 0.0;
              for (int m2 = 0; m2 < d2; ++m2)
                close += chain[m2] * cg_close.coeff(mr, mu, key.j2, m2);
              if (close == 0.0) continue;
              std::array<int, 5> idx = {
                  physical.index_of(key.jp, mp),
                  legs.l.index_of(key.jl, ml, key.deg[0]),
                  legs.r.index_of(key.jr, mr, key.deg[1]),
                  legs.u.index_of(key.ju, mu, key.deg[2]),
                  legs.d.index_of(key.jd, md, key.deg[3])};
              t.amplitudes[idx] += alpha * close;
            }
        }
  }
  for (auto it = t.amplitudes.begin(); it != t.amplitudes.end();)
    it = (std::abs(it->second) < kPrune) ? t.amplitudes.erase(it) : std::next(it);
  return t;
}

LinkTensor build_link_tensor(std::shared_ptr<const Group> group, const LinkSpace& physical,
                             const VirtualLeg& a, const VirtualLeg& b,
                             const std::map<int, Matrix>& beta) {
  LinkTensor t;
  t.group = group;
  t.physical = physical;
  t.a = a;
  t.b = b;
  t.beta = beta;
  for (const auto& [label, block] : beta) {
    if (!physical.has_irrep(label))
      throw Error(Errc::UnknownLabel, "link parameter outside the physical truncation");
    const int ca = a.copies(label), cb = b.copies(label);
    if (block.rows() != ca || block.cols() != cb)
      throw Error(Errc::Config, "link parameter block does not match the leg degeneracies");
    const int dim = group->irrep(label).dim;
    for (int m = 0; m < dim; ++m)
      for (int n = 0; n < dim; ++n)
        for (int ia = 0; ia < ca; ++ia)
          for (int ib = 0; ib < cb; ++ib) {
            const Complex v = block(ia, ib);
            if (std::abs(v) < kPrune) continue;
            t.amplitudes[{physical.index_of(label, m, n), a.index_of(label, m, ia),
                          b.index_of(label, n, ib)}] = v;
          }
  }
  return t;
}

UnifiedTensor unify(const VertexTensor& a, const LinkTensor& side, const LinkTensor& top) {
  if (!same_leg(a.legs.r, side.a) || !same_leg(a.legs.u, top.a))
    throw Error(Errc::LegMismatch,
                "vertex legs do not match the link tensors across the internal bonds");
  UnifiedTensor c;
  c.group = a.group;
  c.vertex_physical = a.physical;
  c.side_physical = side.physical;
  c.top_physical = top.physical;
  c.legs = {a.legs.l, side.b, top.b, a.legs.d};

  // Group the link amplitudes by their contracted (left/down) leg index.
  auto by_leg = [](const LinkTensor& t) {
    std::map<int, std::vector<std::pair<std::array<int, 3>, Complex>>> out;
    for (const auto& [idx, v] : t.amplitudes) out[idx[1]].push_back({idx, v});
    return out;
  };
  auto side_by_leg = by_leg(side);
  auto top_by_leg = by_leg(top);

  for (const auto& [idx, va] : a.amplitudes) {
    auto sit = side_by_leg.find(idx[2]);
    auto tit = top_by_leg.find(idx[3]);
    if (sit == side_by_leg.end() || tit == top_by_leg.end()) continue;
    for (const auto& [sidx, vs] : sit->second)
      for (const auto& [tidx, vt] : tit->second)
        c.amplitudes[{idx[0], sidx[0], tidx[0], idx[1], sidx[2], tidx[2], idx[4]}] +=
            va * vs * vt;
  }
  for (auto it = c.amplitudes.begin(); it != c.amplitudes.end();)
    it = (std::abs(it->second) < kPrune) ? c.amplitudes.erase(it) : std::next(it);
  return c;
}

BondState bond_state(BondState::Orientation orientation, const VirtualLeg& out_edge,
                     const VirtualLeg& in_edge) {
  if (!same_leg(out_edge, in_edge))
    throw Error(Errc::LegMismatch, "bond edges carry different virtual spaces");
  BondState b;
  b.orientation = orientation;
  b.leg = out_edge;
  const int d = out_edge.dim();
  b.coefficients = Vector::Zero(static_cast<long long>(d) * d);
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) b.coefficients(static_cast<long long>(i) * d + i) = w;
  return b;
}

Vector dense(const VertexTensor& t) {
  std::vector<int> dims = {t.physical.dim, t.legs.l.dim(), t.legs.r.dim(), t.legs.u.dim(),
                           t.legs.d.dim()};
  Vector v = Vector::Zero(product(dims));
  for (const auto& [idx, val] : t.amplitudes) {
    long long flat = 0;
    for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
    v(flat) = val;
  }
  return v;
}

Vector dense(const LinkTensor& t) {
  std::vector<int> dims = {t.physical.dim, t.a.dim(), t.b.dim()};
  Vector v = Vector::Zero(product(dims));
  for (const auto& [idx, val] : t.amplitudes) {
    long long flat = 0;
    for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
    v(flat) = val;
  }
  return v;
}

Vector dense(const UnifiedTensor& t) {
  std::vector<int> dims = {t.vertex_physical.dim, t.side_physical.dim, t.top_physical.dim,
                           t.legs.l.dim(),        t.legs.r.dim(),      t.legs.u.dim(),
                           t.legs.d.dim()};
  Vector v = Vector::Zero(product(dims));
  for (const auto& [idx, val] : t.amplitudes) {
    long long flat = 0;
    for (size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
    v(flat) = val;
  }
  return v;
}

double check_symmetry_vertex(const VertexTensor& t, const GroupElement& g) {
  std::vector<int> dims = {t.physical.dim, t.legs.l.dim(), t.legs.r.dim(), t.legs.u.dim(),
                           t.legs.d.dim()};
  Vector v = dense(t);
  Vector lhs = apply_slot(v, dims, 0, theta(t.physical, Side::Right, g));
  Vector rhs = apply_slot(v, dims, 1, leg_theta(t.legs.l, Side::Right, g).adjoint());
  rhs = apply_slot(rhs, dims, 2, leg_theta(t.legs.r, Side::Left, g));
  rhs = apply_slot(rhs, dims, 3, leg_theta(t.legs.u, Side::Left, g));
  rhs = apply_slot(rhs, dims, 4, leg_theta(t.legs.d, Side::Right, g).adjoint());
  return (lhs - rhs).norm();
}

std::array<double, 2> check_symmetry_link(const LinkTensor& t, const GroupElement& g) {
  std::vector<int> dims = {t.physical.dim, t.a.dim(), t.b.dim()};
  Vector v = dense(t);
  Vector lhs1 = apply_slot(v, dims, 0, theta(t.physical, Side::Left, g));
  Vector rhs1 = apply_slot(v, dims, 1, leg_theta(t.a, Side::Right, g));
  Vector lhs2 = apply_slot(v, dims, 0, theta(t.physical, Side::Right, g));
  Vector rhs2 = apply_slot(v, dims, 2, leg_theta(t.b, Side::Left, g));
  return {(lhs1 - rhs1).norm(), (lhs2 - rhs2).norm()};
}

std::array<double, 3> check_symmetry_unified(const UnifiedTensor& t, const GroupElement& g) {
  std::vector<int> dims = {t.vertex_physical.dim, t.side_physical.dim, t.top_physical.dim,
                           t.legs.l.dim(),        t.legs.r.dim(),      t.legs.u.dim(),
                           t.legs.d.dim()};
  Vector v = dense(t);

  Vector lhs0 = apply_slot(v, dims, 0, theta(t.vertex_physical, Side::Right, g));
  Vector rhs0 = apply_slot(v, dims, 1, theta(t.side_physical, Side::Left, g));
  rhs0 = apply_slot(rhs0, dims, 2, theta(t.top_physical, Side::Left, g));
  rhs0 = apply_slot(rhs0, dims, 3, leg_theta(t.legs.l, Side::Right, g).adjoint());
  rhs0 = apply_slot(rhs0, dims, 6, leg_theta(t.legs.d, Side::Right, g).adjoint());

  Vector lhs1 = apply_slot(v, dims, 1, theta(t.side_physical, Side::Right, g));
  Vector rhs1 = apply_slot(v, dims, 4, leg_theta(t.legs.r, Side::Left, g));

  Vector lhs2 = apply_slot(v, dims, 2, theta(t.top_physical, Side::Right, g));
  Vector rhs2 = apply_slot(v, dims, 5, leg_theta(t.legs.u, Side::Left, g));

  return {(lhs0 - rhs0).norm(), (lhs1 - rhs1).norm(), (lhs2 - rhs2).norm()};
}

double check_bond_invariance(const BondState& b, const GroupElement& g) {
  Matrix m = Eigen::kroneckerProduct(leg_theta(b.leg, Side::Left, g),
                                     leg_theta(b.leg, Side::Right, g).adjoint());
  return (m * b.coefficients - b.coefficients).norm();
}

}  // namespace gipeps
