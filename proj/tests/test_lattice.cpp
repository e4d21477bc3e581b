#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <unsupported/Eigen/KroneckerProduct>

#include "gipeps/lattice.hpp"

using namespace gipeps;

namespace {

Complex random_c(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

AlphaMap random_alpha(const Group& g, const std::vector<int>& phys, const std::vector<int>& legs,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AlphaMap alpha;
  for (int jp : phys)
    for (int jl : legs)
      for (int jr : legs)
        for (int ju : legs)
          for (int jd : legs)
            for (int j1 : g.fusion(jl, jd))
              for (int j2 : g.fusion(j1, jp)) {
                bool ok = false;
                for (int c : g.fusion(jr, ju)) ok = ok || c == j2;
                if (ok) alpha[{jp, j1, j2, jl, jr, ju, jd}] = random_c(rng);
              }
  return alpha;
}

std::map<int, Matrix> random_beta(const std::vector<int>& labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<int, Matrix> beta;
  for (int l : labels) {
    Matrix b(1, 1);
    b(0, 0) = random_c(rng);
    beta[l] = b;
  }
  return beta;
}

// Staggered 2x2 charge-backend lattice (Z13 standing in for U(1)).
LatticeSpec make_u1_2x2(std::uint64_t seed) {
  auto g = make_group(GroupId::zn(13));
  LatticeSpec spec;
  spec.lx = spec.ly = 2;
  spec.group = g;
  spec.link_physical = make_link_space(g, std::vector<int>{0, 1, 12});
  spec.leg = VirtualLeg{make_vertex_space(g, std::vector<int>{0, 1, 12}), {}};
  spec.beta = random_beta({0, 1, 12}, seed);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      const std::vector<int> phys = (x + y) % 2 == 0 ? std::vector<int>{0, 1}
                                                     : std::vector<int>{0, 12};
      auto space = make_vertex_space(g, phys);
      auto alpha = random_alpha(*g, phys, {0, 1, 12}, seed + 17 * (y * 2 + x));
      spec.vertices.push_back(lattice_vertex(
          build_vertex_tensor(g, space, {spec.leg, spec.leg, spec.leg, spec.leg}, Ordering::A, alpha)));
    }
  return spec;
}

LatticeSpec make_su2_2x2(std::uint64_t seed, Complex tau_p) {
  auto g = make_group(GroupId::su2());
  LatticeSpec spec;
  spec.lx = spec.ly = 2;
  spec.group = g;
  spec.link_physical = make_link_space(g, std::vector<int>{0, 1});
  spec.leg = VirtualLeg{make_vertex_space(g, std::vector<int>{0, 1}), {}};
  spec.beta = random_beta({0, 1}, seed);
  auto space = make_vertex_space(g, std::vector<int>{0, 1});
  for (int s = 0; s < 4; ++s) {
    auto alpha = random_alpha(*g, {0, 1}, {0, 1}, seed + 31 * s);
    auto t = build_vertex_tensor(g, space, {spec.leg, spec.leg, spec.leg, spec.leg}, Ordering::A,
                                 alpha);
    spec.vertices.push_back(lattice_vertex_with_pair_channel(t, tau_p));
  }
  return spec;
}

double state_norm(const JointState& s) {
  double n = 0.0;
  for (const auto& [k, v] : s) n += std::norm(v);
  return std::sqrt(n);
}

}  // namespace

TEST_CASE("single trivial vertex contracts to its parameter") {
  auto g = make_group(GroupId::zn(2));
  LatticeSpec spec;
  spec.lx = spec.ly = 1;
  spec.group = g;
  spec.link_physical = make_link_space(g, std::vector<int>{0});
  spec.leg = VirtualLeg{make_vertex_space(g, std::vector<int>{0}), {}};
  spec.beta = {{0, Matrix::Identity(1, 1)}};
  auto space = make_vertex_space(g, std::vector<int>{0});
  AlphaMap alpha;
  alpha[{0, 0, 0, 0, 0, 0, 0}] = Complex(0.25, -0.75);
  spec.vertices.push_back(lattice_vertex(
      build_vertex_tensor(g, space, {spec.leg, spec.leg, spec.leg, spec.leg}, Ordering::A, alpha)));

  auto state = contract(spec);
  REQUIRE(state.coefficients.size() == 1);
  CHECK(std::abs(state.coefficients(0) - Complex(0.25, -0.75)) < 1e-15);
}

TEST_CASE("charge lattice: dimensions, invariance, kernel membership, controls") {
  auto spec = make_u1_2x2(101);
  auto state = contract(spec);
  REQUIRE(state.coefficients.size() == 1296);  // 2^4 * 3^4
  CHECK(state.coefficients.norm() > 0.0);

  std::mt19937_64 rng(7);
  const auto gs = spec.group->sample_elements(100, 99);
  for (int t = 0; t < 100; ++t) {
    const int x = int(rng() % 2), y = int(rng() % 2);
    CHECK(check_local_invariance(state, spec, x, y, gs[t]) < 1e-10);
  }
  CHECK(check_local_invariance(state, spec, 0, 0, spec.group->identity()) < 1e-15);

  // Gauge operator factors are unitary; operators at different vertices
  // commute on the state.
  auto op00 = gauge_operator(spec, 0, 0, gs[0]);
  for (const auto& [slot, m] : op00.factors) {
    const int d = state.dims[slot];
    CHECK((m * m.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
  }
  auto op11 = gauge_operator(spec, 1, 1, gs[1]);
  LatticeState tmp = state;
  tmp.coefficients = apply_product(state, op11.factors);
  Vector ab = apply_product(tmp, op00.factors);
  tmp.coefficients = apply_product(state, op00.factors);
  Vector ba = apply_product(tmp, op11.factors);
  CHECK((ab - ba).norm() < 1e-12);

  // Generator law and the exponential cross-check against the gauge
  // operator at the Z13 element phi = 2 pi k / 13.
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      auto gens = gauss_generators(spec, x, y);
      REQUIRE(gens.size() == 1);
      CHECK(apply_sum(state, gens[0]).norm() / state.coefficients.norm() < 1e-10);
      const int k = 1 + int(rng() % 12);
      GroupElement gk;
      gk.index = k;
      auto expo = exp_generators(gens, {2.0 * M_PI * k / 13.0, 0.0, 0.0});
      auto direct = gauge_operator(spec, x, y, gk);
      std::map<int, Matrix> by_slot;
      for (const auto& [slot, m] : direct.factors) by_slot[slot] = m;
      REQUIRE(expo.factors.size() == direct.factors.size());
      for (const auto& [slot, m] : expo.factors)
        CHECK((m - by_slot.at(slot)).cwiseAbs().maxCoeff() < 1e-12);
    }

  // Brute-force Gauss-sector diagonalization: the state lies in the joint
  // kernel of all four generators.
  const int dim = int(state.coefficients.size());
  Matrix h = Matrix::Zero(dim, dim);
  LatticeState basis_state = state;
  for (int j = 0; j < dim; ++j) {
    basis_state.coefficients = Vector::Unit(dim, j);
    Vector col = Vector::Zero(dim);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) {
        auto gens = gauss_generators(spec, x, y);
        LatticeState once = state;
        once.coefficients = apply_sum(basis_state, gens[0]);
        col += apply_sum(once, gens[0]);
      }
    h.col(j) = col;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector proj = Vector::Zero(dim);
  for (int j = 0; j < dim; ++j)
    if (es.eigenvalues()(j) < 1e-9)
      proj += es.eigenvectors().col(j) * es.eigenvectors().col(j).dot(state.coefficients);
  CHECK((state.coefficients - proj).norm() / state.coefficients.norm() < 1e-10);

  // Control: an amplitude violating the charge balance breaks invariance.
  auto bad = spec;
  auto corrupt = bad.vertices[0].amplitudes.begin()->first;
  corrupt[0] = 1 - corrupt[0];  // flip the matter charge, legs unchanged
  bad.vertices[0].amplitudes[corrupt] += Complex(0.5);
  auto bad_state = contract(bad);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t)
    worst = std::max(worst, check_local_invariance(bad_state, bad, 0, 0, gs[t]));
  CHECK(worst > 1e-3);
}

TEST_CASE("spin lattice with doubled trivial sector: invariance and generators") {
  auto spec = make_su2_2x2(303, Complex(0.6, -0.2));
  auto state = contract(spec);
  REQUIRE(state.coefficients.size() == 160000);  // 4^4 * 5^4
  CHECK(state.coefficients.norm() > 0.0);

  std::mt19937_64 rng(17);
  const auto gs = spec.group->sample_elements(100, 4242);
  for (int t = 0; t < 100; ++t) {
    const int x = int(rng() % 2), y = int(rng() % 2);
    CHECK(check_local_invariance(state, spec, x, y, gs[t]) < 1e-10);
  }

  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      auto gens = gauss_generators(spec, x, y);
      REQUIRE(gens.size() == 3);
      for (const auto& terms : gens)
        CHECK(apply_sum(state, terms).norm() / state.coefficients.norm() < 1e-10);

      const std::array<double, 3> q{u(rng), u(rng), u(rng)};
      auto expo = exp_generators(gens, q);
      auto direct = gauge_operator(spec, x, y, su2_element_from_parameters(q));
      std::map<int, Matrix> by_slot;
      for (const auto& [slot, m] : direct.factors) by_slot[slot] = m;
      for (const auto& [slot, m] : expo.factors)
        CHECK((m - by_slot.at(slot)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("periodic lattice keeps every vertex constraint") {
  auto g = make_group(GroupId::zn(3));
  LatticeSpec spec;
  spec.lx = spec.ly = 2;
  spec.boundary = LatticeSpec::Boundary::Periodic;
  spec.group = g;
  spec.link_physical = make_link_space(g);
  spec.leg = VirtualLeg{make_vertex_space(g), {}};
  spec.beta = random_beta({0, 1, 2}, 5);
  auto space = make_vertex_space(g);
  for (int s = 0; s < 4; ++s) {
    auto alpha = random_alpha(*g, {0, 1, 2}, {0, 1, 2}, 500 + s);
    spec.vertices.push_back(lattice_vertex(
        build_vertex_tensor(g, space, {spec.leg, spec.leg, spec.leg, spec.leg}, Ordering::A, alpha)));
  }
  auto state = contract(spec);
  REQUIRE(state.coefficients.size() == 81 * 6561);  // 3^4 * 3^8
  const auto gs = g->sample_elements(10, 3);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x)
      for (const auto& ge : gs) CHECK(check_local_invariance(state, spec, x, y, ge) < 1e-10);
}

TEST_CASE("contraction guards") {
  auto spec = make_su2_2x2(9, Complex(0.0));
  spec.lx = spec.ly = 4;
  for (int s = 4; s < 16; ++s) spec.vertices.push_back(spec.vertices[s % 4]);
  CHECK_THROWS_AS((void)contract(spec), Error);
  try {
    (void)contract(spec);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooLarge);
  }

  auto empty = make_u1_2x2(11);
  for (auto& v : empty.vertices) v.amplitudes.clear();
  CHECK_THROWS_AS((void)contract(empty), Error);
}

TEST_CASE("stepwise symmetry proof ingredients for spins up to one") {
  auto g = make_group(GroupId::su2());
  const auto gs = g->sample_elements(10, 77);
  for (int ja : {0, 1, 2})
    for (int jb : {0, 1, 2}) {
      auto cg = g->clebsch_gordan(ja, jb);
      const int da = ja + 1, db = jb + 1;
      // product representation decomposes through the coupling isometries
      for (const auto& ge : gs) {
        Matrix lhs = Eigen::kroneckerProduct(g->wigner_d(ja, ge), g->wigner_d(jb, ge));
        Matrix rhs = Matrix::Zero(da * db, da * db);
        for (int c : cg.channels) {
          const Matrix w = cg.isometry.at(c).cast<Complex>();
          rhs += w * g->wigner_d(c, ge) * w.adjoint();
        }
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((lhs.conjugate() - rhs.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
      }
      // completeness within the representations
      for (int c1 : cg.channels)
        for (int c2 : cg.channels) {
          const Matrix w1 = cg.isometry.at(c1).cast<Complex>();
          const Matrix w2 = cg.isometry.at(c2).cast<Complex>();
          const Matrix prod = w1.adjoint() * w2;
          if (c1 == c2)
            CHECK((prod - Matrix::Identity(c1 + 1, c1 + 1)).cwiseAbs().maxCoeff() < 1e-12);
          else
            CHECK(prod.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
  // Wigner unitarity in the contracted form used by the final step
  for (int j : {0, 1, 2})
    for (const auto& ge : gs) {
      const Matrix d = g->wigner_d(j, ge);
      CHECK((d * d.adjoint() - Matrix::Identity(j + 1, j + 1)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((g->wigner_d(j, g->inverse(ge)) - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }

  // Full chain on the tensor, including the single-sector variant.
  auto space = make_vertex_space(g, std::vector<int>{0, 1, 2});
  VirtualLeg leg{space, {}};
  auto alpha = random_alpha(*g, {0, 1, 2}, {0, 1, 2}, 811);
  auto t = build_vertex_tensor(g, space, {leg, leg, leg, leg}, Ordering::A, alpha);
  AlphaMap single;
  single[{1, 1, 2, 1, 1, 1, 0}] = Complex(1.0, 0.5);
  auto ts = build_vertex_tensor(g, space, {leg, leg, leg, leg}, Ordering::A, single);
  for (const auto& ge : gs) {
    CHECK(check_symmetry_vertex(t, ge) < 1e-12);
    CHECK(check_symmetry_vertex(ts, ge) < 1e-12);
  }
}

TEST_CASE("fermionic charge lattice: global symmetry and Gauss annihilation") {
  std::mt19937_64 rng(23);
  FermU1Spec spec;
  spec.eps = {+1, -1, -1, +1};
  for (int s = 0; s < 4; ++s) {
    std::map<unsigned, Complex> alpha;
    for (int t = 0; t < 300; ++t) alpha[unsigned(rng() & 0x1ffu)] = random_c(rng);
    alpha[0u] = Complex(1.0);
    spec.alpha.push_back(alpha);
  }

  auto plain = assemble_ferm_u1(spec, false);
  REQUIRE(!plain.physical.empty());
  // every surviving component carries zero total staggered charge
  double mismatch = 0.0;
  for (const auto& [key, v] : plain.physical) {
    int q = 0;
    for (int s = 0; s < 4; ++s) q += spec.eps[s] * int((key.first >> s) & 1ull);
    if (q != 0) mismatch += std::norm(v);
  }
  CHECK(std::sqrt(mismatch) / state_norm(plain.physical) < 1e-10);

  auto gauged = assemble_ferm_u1(spec, true);
  REQUIRE(!gauged.physical.empty());
  const double norm = state_norm(gauged.physical);
  for (int s = 0; s < 4; ++s) {
    const int x = s % 2, y = s / 2;
    double bad = 0.0;
    for (const auto& [key, v] : gauged.physical) {
      const auto link = gauged.links.decode(key.second);
      auto e = [&](int slot) { return slot < 0 ? 0 : 1 - link[slot]; };
      const int right = x < 1 ? y * 1 + x : -1;  // (lx-1)*ly horizontal slots
      const int up = y < 1 ? 2 + y * 2 + x : -1;
      const int left = x > 0 ? y * 1 + (x - 1) : -1;
      const int down = y > 0 ? 2 + (y - 1) * 2 + x : -1;
      const int charge = spec.eps[s] * int((key.first >> s) & 1ull);
      const int gauss = e(right) + e(up) - e(left) - e(down) - charge;
      bad += double(gauss) * double(gauss) * std::norm(v);
    }
    CHECK(std::sqrt(bad) / norm < 1e-10);
  }
}

TEST_CASE("fermionic spin pair: global symmetry and Gauss annihilation") {
  std::array<AlphaMap, 2> alpha;
  // site 0 uses its right leg, site 1 its left leg
  alpha[0][{0, 0, 0, 0, 0, 0, 0}] = Complex(0.8, 0.1);
  alpha[0][{1, 0, 1, 0, 1, 0, 0}] = Complex(0.5, -0.6);
  alpha[1][{0, 0, 0, 0, 0, 0, 0}] = Complex(-0.3, 0.9);
  alpha[1][{1, 1, 0, 1, 0, 0, 0}] = Complex(1.1, 0.2);
  std::array<std::array<Complex, 5>, 2> tau{};
  tau[0][0] = Complex(0.4, 0.3);
  tau[0][2] = Complex(-0.25, 0.15);
  tau[1][0] = Complex(0.2, -0.5);
  tau[1][1] = Complex(0.35);

  auto jmat = su2_spin_matrices(1);
  auto basis = fock_space(4);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.5, 1.5);

  auto plain = assemble_ferm_su2_pair(alpha, tau, false);
  REQUIRE(!plain.physical.empty());
  Vector psi0 = Vector::Zero(16);
  for (const auto& [key, v] : plain.physical) psi0(basis.index.at(key.first)) = v;
  for (int trial = 0; trial < 5; ++trial) {
    Matrix h = Matrix::Zero(16, 16);
    std::array<double, 3> q{u(rng), u(rng), u(rng)};
    for (int axis = 0; axis < 3; ++axis)
      h += q[axis] * (realize(quadratic({0, 1}, jmat[axis]), basis) +
                      realize(quadratic({2, 3}, jmat[axis]), basis));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases = (Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
    Vector rotated = es.eigenvectors() * phases.asDiagonal() *
                     (es.eigenvectors().adjoint() * psi0);
    CHECK((rotated - psi0).norm() / psi0.norm() < 1e-10);
  }

  auto gauged = assemble_ferm_su2_pair(alpha, tau, true);
  REQUIRE(!gauged.physical.empty());
  auto g = make_group(GroupId::su2());
  auto space = make_link_space(g, std::vector<int>{0, 1});
  auto link_gen = su2_generators(space);
  Vector psi = Vector::Zero(16 * 5);
  for (const auto& [key, v] : gauged.physical)
    psi(basis.index.at(key.first) * 5 + int(key.second)) = v;
  const Matrix idf = Matrix::Identity(16, 16), idl = Matrix::Identity(5, 5);
  for (int axis = 0; axis < 3; ++axis) {
    const Matrix q0 = realize(quadratic({0, 1}, jmat[axis]), basis);
    const Matrix q1 = realize(quadratic({2, 3}, jmat[axis]), basis);
    const Matrix g0 = Eigen::kroneckerProduct(idf, link_gen.l[axis]) -
                      Eigen::kroneckerProduct(q0, idl);
    const Matrix g1 = -Eigen::kroneckerProduct(idf, link_gen.r[axis]) -
                      Eigen::kroneckerProduct(q1, idl);
    CHECK((g0 * psi).norm() / psi.norm() < 1e-10);
    CHECK((g1 * psi).norm() / psi.norm() < 1e-10);
  }
}

TEST_CASE("tunneling terms commute with the local gauge transformations") {
  auto z13 = make_group(GroupId::zn(13));
  CHECK(tunneling_invariance(z13, {0, 1, 12}, 1, 20, 61, false) < 1e-12);
  auto su2 = make_group(GroupId::su2());
  CHECK(tunneling_invariance(su2, {0, 1}, 1, 20, 62, false) < 1e-12);
  // transposed connection as a control
  CHECK(tunneling_invariance(z13, {0, 1, 12}, 1, 20, 61, true) > 1e-3);
  CHECK(tunneling_invariance(su2, {0, 1}, 1, 20, 62, true) > 1e-3);
}
