#include "gipeps/group.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gipeps/detail/rational.hpp"

namespace gipeps {

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double fact(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Exact SU(2) coefficients
// ---------------------------------------------------------------------------

double su2_cg(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3) {
  using detail::Rat;
  using detail::factorial;
  if (tm1 + tm2 != tm3) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
  if (((tj1 + tm1) & 1) || ((tj2 + tm2) & 1) || ((tj3 + tm3) & 1)) return 0.0;
  if (tj3 < std::abs(tj1 - tj2) || tj3 > tj1 + tj2 || ((tj1 + tj2 + tj3) & 1)) return 0.0;

  // All of these are integers for admissible inputs.
  const int a = (tj1 + tj2 - tj3) / 2;
  const int b = (tj1 - tj2 + tj3) / 2;
  const int c = (-tj1 + tj2 + tj3) / 2;
  const int jm1 = (tj1 + tm1) / 2, jn1 = (tj1 - tm1) / 2;
  const int jm2 = (tj2 + tm2) / 2, jn2 = (tj2 - tm2) / 2;
  const int jm3 = (tj3 + tm3) / 2, jn3 = (tj3 - tm3) / 2;

  Rat pref = Rat(tj3 + 1) * factorial(a) * factorial(b) * factorial(c) / factorial((tj1 + tj2 + tj3) / 2 + 1);
  pref = pref * factorial(jm3) * factorial(jn3) * factorial(jm1) * factorial(jn1) * factorial(jm2) * factorial(jn2);

  Rat sum(0);
  const int kmax = std::min({a, jn1, jm2});
  const int kmin = std::max({0, -(tj3 - tj2 + tm1) / 2, -(tj3 - tj1 - tm2) / 2});
  for (int k = kmin; k <= kmax; ++k) {
    Rat term = Rat((k % 2) ? -1 : 1) /
               (factorial(k) * factorial(a - k) * factorial(jn1 - k) * factorial(jm2 - k) *
                factorial((tj3 - tj2 + tm1) / 2 + k) * factorial((tj3 - tj1 - tm2) / 2 + k));
    sum = sum + term;
  }
  return sum.to_double() * std::sqrt(pref.to_double());
}

namespace {

bool triangle_ok(int ta, int tb, int tc) {
  return tc >= std::abs(ta - tb) && tc <= ta + tb && ((ta + tb + tc) % 2 == 0);
}

detail::Rat triangle_delta(int ta, int tb, int tc) {
  using detail::factorial;
  return factorial((ta + tb - tc) / 2) * factorial((ta - tb + tc) / 2) * factorial((-ta + tb + tc) / 2) /
         factorial((ta + tb + tc) / 2 + 1);
}

}  // namespace

double six_j(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6) {
  using detail::Rat;
  using detail::factorial;
  if (!triangle_ok(tj1, tj2, tj3) || !triangle_ok(tj1, tj5, tj6) || !triangle_ok(tj4, tj2, tj6) ||
      !triangle_ok(tj4, tj5, tj3))
    return 0.0;

  Rat delta = triangle_delta(tj1, tj2, tj3) * triangle_delta(tj1, tj5, tj6) * triangle_delta(tj4, tj2, tj6) *
              triangle_delta(tj4, tj5, tj3);

  const int s1 = (tj1 + tj2 + tj3) / 2;
  const int s2 = (tj1 + tj5 + tj6) / 2;
  const int s3 = (tj4 + tj2 + tj6) / 2;
  const int s4 = (tj4 + tj5 + tj3) / 2;
  const int p1 = (tj1 + tj2 + tj4 + tj5) / 2;
  const int p2 = (tj2 + tj3 + tj5 + tj6) / 2;
  const int p3 = (tj3 + tj1 + tj6 + tj4) / 2;

  Rat sum(0);
  for (int t = std::max({s1, s2, s3, s4}); t <= std::min({p1, p2, p3}); ++t) {
    Rat term = Rat((t % 2) ? -1 : 1) * factorial(t + 1) /
               (factorial(t - s1) * factorial(t - s2) * factorial(t - s3) * factorial(t - s4) * factorial(p1 - t) *
                factorial(p2 - t) * factorial(p3 - t));
    sum = sum + term;
  }
  return sum.to_double() * std::sqrt(delta.to_double());
}

// ---------------------------------------------------------------------------
// Group base
// ---------------------------------------------------------------------------

int Group::order() const { throw Error(Errc::NotApplicable, "order(): not a finite group"); }

std::vector<Irrep> Group::all_irreps() const {
  throw Error(Errc::UntruncatedLieGroup, "SU(2) has infinitely many irreps; a truncation is required");
}

std::vector<GroupElement> Group::elements() const {
  throw Error(Errc::NotApplicable, "elements(): not a finite group");
}

std::vector<Irrep> Group::irreps(const std::optional<std::vector<int>>& truncation) const {
  std::vector<Irrep> out;
  if (!truncation) {
    out = all_irreps();  // throws UntruncatedLieGroup for SU(2)
  } else {
    for (int label : *truncation) out.push_back(irrep(label));
  }
  std::sort(out.begin(), out.end(), [](const Irrep& a, const Irrep& b) { return a.label < b.label; });
  out.erase(std::unique(out.begin(), out.end(), [](const Irrep& a, const Irrep& b) { return a.label == b.label; }),
            out.end());
  return out;
}

double Group::casimir(int label) const {
  if (id_.kind != GroupKind::SU2) throw Error(Errc::NotApplicable, "casimir(): finite group has no Lie algebra");
  irrep(label);
  return 0.25 * label * (label + 2);  // j(j+1) with label = 2j
}

CGTable Group::clebsch_gordan(int a, int b) const {
  CGTable t;
  t.group = id_;
  t.a = a;
  t.b = b;
  const int da = irrep(a).dim, db = irrep(b).dim;
  t.dim_a = da;
  t.dim_b = db;
  t.channels = fusion(a, b);
  for (int c : t.channels) {
    const int dc = irrep(c).dim;
    RealMatrix w(da * db, dc);
    for (int ia = 0; ia < da; ++ia)
      for (int ib = 0; ib < db; ++ib)
        for (int ic = 0; ic < dc; ++ic) w(ia * db + ib, ic) = cg(a, ia, b, ib, c, ic);
    t.isometry[c] = std::move(w);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Finite groups
// ---------------------------------------------------------------------------

namespace {

class FiniteGroup : public Group {
 public:
  using Group::Group;

  std::vector<GroupElement> elements() const override {
    std::vector<GroupElement> out(order());
    for (int i = 0; i < order(); ++i) out[i].index = i;
    return out;
  }

  std::vector<GroupElement> sample_elements(int count, std::uint64_t seed) const override {
    std::mt19937_64 rng(seed);
    std::vector<GroupElement> out(count);
    for (auto& g : out) g.index = static_cast<int>(rng() % static_cast<std::uint64_t>(order()));
    return out;
  }

  GroupElement identity() const override { return GroupElement{}; }

  double cg(int a, int ia, int b, int ib, int c, int ic) const override {
    auto it = cg_cache_.find({a, b});
    if (it == cg_cache_.end()) throw Error(Errc::UnknownLabel, "cg: unknown irrep pair");
    auto jt = it->second.find(c);
    if (jt == it->second.end()) return 0.0;
    return jt->second(ia * irrep(b).dim + ib, ic);
  }

  std::vector<int> fusion(int a, int b) const override {
    auto it = cg_cache_.find({a, b});
    if (it == cg_cache_.end()) throw Error(Errc::UnknownLabel, "fusion: unknown irrep pair");
    std::vector<int> out;
    for (const auto& [c, w] : it->second) out.push_back(c);
    return out;
  }

 protected:
  // Projection-operator construction of the CG isometries from the D
  // matrices; run once at construction for every irrep pair.
  void build_cg_tables() {
    const auto irr = all_irreps();
    const auto els = elements();
    const double n = static_cast<double>(order());
    for (const auto& ra : irr) {
      for (const auto& rb : irr) {
        std::map<int, RealMatrix> slices;
        for (const auto& rc : irr) {
          // Multiplicity from characters.
          Complex mult = 0.0;
          for (const auto& g : els) {
            mult += std::conj(wigner_d(rc.label, g).trace()) * wigner_d(ra.label, g).trace() *
                    wigner_d(rb.label, g).trace();
          }
          const int m = static_cast<int>(std::lround(mult.real() / n));
          if (m == 0) continue;
          if (m > 1)
            throw Error(Errc::NotApplicable, "finite-group fusion with outer multiplicity is not supported");

          const int dprod = ra.dim * rb.dim;
          // Find a seeding column l0 and vector v with nonvanishing projection.
          Matrix w;
          bool found = false;
          for (int l0 = 0; l0 < rc.dim && !found; ++l0) {
            for (int t = 0; t < dprod && !found; ++t) {
              Matrix cols = Matrix::Zero(dprod, rc.dim);
              for (const auto& g : els) {
                const Matrix dc = wigner_d(rc.label, g);
                const Matrix dp = kron(wigner_d(ra.label, g), wigner_d(rb.label, g));
                for (int k = 0; k < rc.dim; ++k) cols.col(k) += std::conj(dc(k, l0)) * dp.col(t);
              }
              cols *= rc.dim / n;
              if (cols.col(l0).norm() > 1e-8) {
                w = cols / cols.col(l0).norm();
                found = true;
              }
            }
          }
          if (!found) throw Error(Errc::NotApplicable, "CG projection failed to seed");
          // Phase convention: first nonvanishing entry positive real.
          for (int i = 0; i < w.size(); ++i) {
            const Complex v = w(i / rc.dim, i % rc.dim);
            if (std::abs(v) > 1e-8) {
              w *= std::conj(v) / std::abs(v);
              break;
            }
          }
          slices[rc.label] = w.real();
        }
        cg_cache_[{ra.label, rb.label}] = std::move(slices);
      }
    }
  }

  std::map<std::pair<int, int>, std::map<int, RealMatrix>> cg_cache_;
};

class ZnGroup final : public FiniteGroup {
 public:
  explicit ZnGroup(int n) : FiniteGroup(GroupId::zn(n)), n_(n) {
    if (n < 2) throw Error(Errc::Config, "Z_N requires N >= 2");
    build_cg_tables();
  }

  int order() const override { return n_; }

  std::vector<Irrep> all_irreps() const override {
    std::vector<Irrep> out;
    for (int q = 0; q < n_; ++q) out.push_back({q, 1, FermionParity::Unassigned, std::nullopt});
    return out;
  }

  Matrix wigner_d(int label, const GroupElement& g) const override {
    check_label(label);
    Matrix d(1, 1);
    d(0, 0) = std::polar(1.0, 2.0 * kPi * g.index * label / n_);
    return d;
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    GroupElement out;
    out.index = (g.index + h.index) % n_;
    return out;
  }

  GroupElement inverse(const GroupElement& g) const override {
    GroupElement out;
    out.index = (n_ - g.index) % n_;
    return out;
  }

 private:
  void check_label(int label) const {
    if (label < 0 || label >= n_) throw Error(Errc::UnknownLabel, "Z_N charge out of range");
  }
  int n_;
};

class S3Group final : public FiniteGroup {
 public:
  S3Group() : FiniteGroup(GroupId::s3()) {
    // Elements in a fixed order: e, (01), (02), (12), (012), (021),
    // as maps i -> perm[i].
    perms_ = {{{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}}};
    // Orthonormal basis of the plane x+y+z = 0 for the standard irrep.
    Eigen::Matrix<double, 3, 2> u;
    u << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),  //
        -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),  //
        0.0, -2.0 / std::sqrt(6.0);
    for (int e = 0; e < 6; ++e) {
      Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
      for (int i = 0; i < 3; ++i) p(perms_[e][i], i) = 1.0;
      std2_[e] = u.transpose() * p * u;
      sign_[e] = parity(e);
    }
    build_cg_tables();
  }

  int order() const override { return 6; }

  std::vector<Irrep> all_irreps() const override {
    return {{0, 1, FermionParity::Unassigned, std::nullopt},
            {1, 1, FermionParity::Unassigned, std::nullopt},
            {2, 2, FermionParity::Unassigned, std::nullopt}};
  }

  Matrix wigner_d(int label, const GroupElement& g) const override {
    if (g.index < 0 || g.index >= 6) throw Error(Errc::UnknownLabel, "S3 element out of range");
    switch (label) {
      case 0:
        return Matrix::Identity(1, 1);
      case 1: {
        Matrix d(1, 1);
        d(0, 0) = sign_[g.index];
        return d;
      }
      case 2:
        return std2_[g.index].cast<Complex>();
      default:
        throw Error(Errc::UnknownLabel, "S3 irrep label must be 0, 1 or 2");
    }
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    std::array<int, 3> c;
    for (int i = 0; i < 3; ++i) c[i] = perms_[g.index][perms_[h.index][i]];
    for (int e = 0; e < 6; ++e)
      if (perms_[e] == c) return GroupElement{e, {}};
    throw Error(Errc::NotApplicable, "S3 composition table corrupted");
  }

  GroupElement inverse(const GroupElement& g) const override {
    std::array<int, 3> inv;
    for (int i = 0; i < 3; ++i) inv[perms_[g.index][i]] = i;
    for (int e = 0; e < 6; ++e)
      if (perms_[e] == inv) return GroupElement{e, {}};
    throw Error(Errc::NotApplicable, "S3 inversion table corrupted");
  }

 private:
  static double parity(int e) { return (e == 0 || e >= 4) ? 1.0 : -1.0; }
  std::array<std::array<int, 3>, 6> perms_;
  std::array<Eigen::Matrix2d, 6> std2_;
  std::array<double, 6> sign_;
};

// ---------------------------------------------------------------------------
// SU(2)
// ---------------------------------------------------------------------------

Eigen::Matrix2cd su2_fundamental(const GroupElement& g) {
  const double a = g.euler[0], b = g.euler[1], c = g.euler[2];
  const double cb = std::cos(0.5 * b), sb = std::sin(0.5 * b);
  Eigen::Matrix2cd m;  // m-ascending basis (-1/2, +1/2)
  m(0, 0) = std::polar(cb, 0.5 * (a + c));
  m(0, 1) = std::polar(sb, 0.5 * (a - c));
  m(1, 0) = -std::polar(sb, -0.5 * (a - c));
  m(1, 1) = std::polar(cb, -0.5 * (a + c));
  return m;
}

double wrap4pi(double x) {
  x = std::fmod(x, 4.0 * kPi);
  if (x < 0) x += 4.0 * kPi;
  return x;
}

GroupElement su2_from_fundamental(const Eigen::Matrix2cd& m) {
  GroupElement g;
  const double cb = std::abs(m(0, 0));
  const double sb = std::abs(m(0, 1));
  g.euler[1] = 2.0 * std::atan2(sb, cb);
  if (sb < 1e-14) {
    g.euler[0] = wrap4pi(2.0 * std::arg(m(0, 0)));
    g.euler[2] = 0.0;
  } else if (cb < 1e-14) {
    g.euler[0] = wrap4pi(2.0 * std::arg(m(0, 1)));
    g.euler[2] = 0.0;
  } else {
    const double a = std::arg(m(0, 0));  // (alpha + gamma)/2
    const double b = std::arg(m(0, 1));  // (alpha - gamma)/2
    g.euler[0] = wrap4pi(a + b);
    g.euler[2] = wrap4pi(a - b);
  }
  return g;
}

class Su2Group final : public Group {
 public:
  Su2Group() : Group(GroupId::su2()) {}

  std::vector<Irrep> all_irreps() const override {
    throw Error(Errc::UntruncatedLieGroup, "SU(2) has infinitely many irreps; a truncation is required");
  }

  Matrix wigner_d(int label, const GroupElement& g) const override {
    if (label < 0) throw Error(Errc::UnknownLabel, "SU(2) label must be a nonnegative doubled spin");
    const int dim = label + 1;
    const double alpha = g.euler[0], beta = g.euler[1], gamma = g.euler[2];
    Matrix d(dim, dim);
    for (int r = 0; r < dim; ++r) {
      const double mp = 0.5 * su2_two_m(label, r);
      for (int c = 0; c < dim; ++c) {
        const double m = 0.5 * su2_two_m(label, c);
        d(r, c) = std::polar(1.0, -alpha * mp) * small_d(label, r, c, beta) * std::polar(1.0, -gamma * m);
      }
    }
    return d;
  }

  std::vector<int> fusion(int a, int b) const override {
    std::vector<int> out;
    for (int c = std::abs(a - b); c <= a + b; c += 2) out.push_back(c);
    return out;
  }

  double cg(int a, int ia, int b, int ib, int c, int ic) const override {
    return su2_cg(a, su2_two_m(a, ia), b, su2_two_m(b, ib), c, su2_two_m(c, ic));
  }

  GroupElement identity() const override { return GroupElement{}; }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    return su2_from_fundamental(su2_fundamental(g) * su2_fundamental(h));
  }

  GroupElement inverse(const GroupElement& g) const override {
    return su2_from_fundamental(su2_fundamental(g).adjoint());
  }

  std::vector<GroupElement> sample_elements(int count, std::uint64_t seed) const override {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GroupElement> out(count);
    for (auto& g : out) {
      g.euler[0] = 4.0 * kPi * unit(rng);
      g.euler[1] = std::acos(1.0 - 2.0 * unit(rng));  // density sin(beta)/2
      g.euler[2] = 4.0 * kPi * unit(rng);
    }
    return out;
  }

 private:
  // Wigner small-d in the m-ascending basis: entry (r, c) is d^j_{m' m}
  // with m' = r - j, m = c - j.
  static double small_d(int label, int r, int c, double beta) {
    const int jpm = c, jmm = label - c, jpmp = r, jmmp = label - r;
    const int dm = r - c;  // m' - m
    const double cb = std::cos(0.5 * beta), sb = std::sin(0.5 * beta);
    const double pref = std::sqrt(fact(jpm) * fact(jmm) * fact(jpmp) * fact(jmmp));
    double sum = 0.0;
    for (int s = std::max(0, -dm); s <= std::min(jpm, jmmp); ++s) {
      const double sign = ((dm + s) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * std::pow(cb, label - dm - 2 * s) * std::pow(sb, dm + 2 * s) /
             (fact(jpm - s) * fact(s) * fact(dm + s) * fact(jmmp - s));
    }
    return pref * sum;
  }

};

}  // namespace

Irrep Group::irrep(int label) const {
  if (id_.kind == GroupKind::SU2) {
    if (label < 0) throw Error(Errc::UnknownLabel, "SU(2) label must be a nonnegative doubled spin");
    return {label, label + 1, (label % 2) ? FermionParity::Odd : FermionParity::Even, std::nullopt};
  }
  for (const auto& r : all_irreps())
    if (r.label == label) return r;
  throw Error(Errc::UnknownLabel, "unknown irrep label");
}

std::array<Matrix, 3> su2_spin_matrices(int label) {
  if (label < 0) throw Error(Errc::UnknownLabel, "SU(2) label must be a nonnegative doubled spin");
  const int dim = label + 1;
  const double j = 0.5 * label;
  Matrix jp = Matrix::Zero(dim, dim);  // raising operator
  for (int i = 0; i + 1 < dim; ++i) {
    const double m = 0.5 * Group::su2_two_m(label, i);
    jp(i + 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const Complex ii(0.0, 1.0);
  std::array<Matrix, 3> out;
  out[0] = 0.5 * (jp + jp.adjoint());
  out[1] = -0.5 * ii * (jp - Matrix(jp.adjoint()));
  out[2] = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) out[2](i, i) = 0.5 * Group::su2_two_m(label, i);
  return out;
}

GroupElement su2_element_from_parameters(const std::array<double, 3>& q) {
  const double theta = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
  Eigen::Matrix2cd m = std::cos(0.5 * theta) * Eigen::Matrix2cd::Identity();
  if (theta > 0.0) {
    const auto spin = su2_spin_matrices(1);
    Eigen::Matrix2cd qdotj = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 3; ++a) qdotj += (q[a] / theta) * spin[a];
    m += Complex(0.0, 2.0 * std::sin(0.5 * theta)) * qdotj;
  }
  return su2_from_fundamental(m);
}

std::shared_ptr<const Group> make_group(GroupId id) {
  switch (id.kind) {
    case GroupKind::CyclicZN:
      return std::make_shared<ZnGroup>(id.order);
    case GroupKind::SymmetricS3:
      return std::make_shared<S3Group>();
    case GroupKind::SU2:
      return std::make_shared<Su2Group>();
  }
  throw Error(Errc::Config, "unknown group kind");
}

}  // namespace gipeps
