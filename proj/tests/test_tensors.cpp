#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gipeps/tensors.hpp"

using namespace gipeps;

namespace {

bool contains(const std::vector<int>& v, int x) {
  for (int y : v)
    if (y == x) return true;
  return false;
}

VirtualLeg make_leg(std::shared_ptr<const Group> g, std::vector<int> labels,
                    std::map<int, int> deg = {}) {
  return VirtualLeg{make_vertex_space(g, labels), std::move(deg)};
}

// All fusion-admissible parameter keys for the standard coupling order,
// given label sets for the legs and the physical space.
std::vector<AlphaKey> admissible_keys(const Group& g, const std::vector<int>& leg_labels,
                                      const std::vector<int>& phys_labels) {
  std::vector<AlphaKey> out;
  for (int jl : leg_labels)
    for (int jr : leg_labels)
      for (int ju : leg_labels)
        for (int jd : leg_labels)
          for (int jp : phys_labels)
            for (int j1 : g.fusion(jl, jd))
              for (int j2 : g.fusion(j1, jp))
                if (contains(g.fusion(jr, ju), j2)) out.push_back({jp, j1, j2, jl, jr, ju, jd});
  return out;
}

AlphaMap random_alpha(const std::vector<AlphaKey>& keys, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  AlphaMap out;
  for (const auto& k : keys) out[k] = Complex(unit(rng), unit(rng));
  return out;
}

}  // namespace

TEST_CASE("cyclic-group vertex amplitudes obey the charge balance rule") {
  const int n = 5;
  auto g = make_group(GroupId::zn(n));
  auto space = make_vertex_space(g);
  VirtualLeg leg{space, {}};
  auto alpha = random_alpha(admissible_keys(*g, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}), 3);
  auto t = build_vertex_tensor(g, space, {leg, leg, leg, leg}, Ordering::A, alpha);
  CHECK(!t.amplitudes.empty());
  for (const auto& [idx, v] : t.amplitudes) {
    CHECK(std::abs(v) > 1e-15);
    // index == charge for the full cyclic space
    CHECK((idx[2] + idx[3] - idx[1] - idx[4] - idx[0]) % n == 0);
  }
  for (const auto& el : g->sample_elements(100, 17))
    CHECK(check_symmetry_vertex(t, el) < 1e-12);
}

TEST_CASE("all-trivial vertex tensor is a single free amplitude") {
  auto g = make_group(GroupId::su2());
  auto space = make_vertex_space(g, std::vector<int>{0});
  VirtualLeg leg{space, {}};
  AlphaMap alpha;
  alpha[AlphaKey{0, 0, 0, 0, 0, 0, 0}] = Complex(0.7, -0.2);
  auto t = build_vertex_tensor(g, space, {leg, leg, leg, leg}, Ordering::A, alpha);
  REQUIRE(t.amplitudes.size() == 1);
  CHECK(std::abs(t.amplitudes.begin()->second - Complex(0.7, -0.2)) < 1e-15);
  for (const auto& el : g->sample_elements(5, 1)) CHECK(check_symmetry_vertex(t, el) < 1e-14);
}

TEST_CASE("vertex tensors satisfy the virtual Gauss law") {
  struct Backend {
    std::shared_ptr<const Group> g;
    std::vector<int> leg_labels, phys_labels;
  };
  std::vector<Backend> backends = {
      {make_group(GroupId::zn(3)), {0, 1, 2}, {0, 1, 2}},
      {make_group(GroupId::s3()), {0, 1, 2}, {0, 1, 2}},
      {make_group(GroupId::su2()), {0, 1}, {0, 1}},
  };
  int bi = 0;
  for (const auto& b : backends) {
    auto space = make_vertex_space(b.g, b.phys_labels);
    VirtualLeg leg{make_vertex_space(b.g, b.leg_labels), {}};
    auto keys = admissible_keys(*b.g, b.leg_labels, b.phys_labels);
    auto alpha = random_alpha(keys, 100 + bi);
    auto t = build_vertex_tensor(b.g, space, {leg, leg, leg, leg}, Ordering::A, alpha);
    for (const auto& el : b.g->sample_elements(100, 23 + bi))
      CHECK(check_symmetry_vertex(t, el) < 1e-12);

    // Every summand is symmetric on its own.
    AlphaMap single;
    single[keys.back()] = Complex(1.0, 0.3);
    auto t1 = build_vertex_tensor(b.g, space, {leg, leg, leg, leg}, Ordering::A, single);
    for (const auto& el : b.g->sample_elements(20, 31 + bi))
      CHECK(check_symmetry_vertex(t1, el) < 1e-12);

    // A corrupted amplitude is detected: place weight on a tuple that
    // violates the fusion selection rule (nontrivial physical state over
    // all-trivial legs).
    auto bad = t;
    bad.amplitudes[{space.dim - 1, 0, 0, 0, 0}] += 0.1;
    double worst = 0.0;
    for (const auto& el : b.g->sample_elements(10, 41 + bi))
      worst = std::max(worst, check_symmetry_vertex(bad, el));
    CHECK(worst > 1e-3);
    ++bi;
  }
}

TEST_CASE("inadmissible parameter keys are rejected") {
  auto g = make_group(GroupId::su2());
  auto space = make_vertex_space(g, std::vector<int>{0, 1});
  VirtualLeg leg{make_vertex_space(g, std::vector<int>{0, 1}), {}};
  AlphaMap alpha;
  alpha[AlphaKey{0, 1, 1, 0, 0, 0, 0}] = 1.0;  // 0 x 0 does not reach spin 1/2
  try {
    build_vertex_tensor(g, space, {leg, leg, leg, leg}, Ordering::A, alpha);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InadmissibleFusionKey);
  }
}

TEST_CASE("link tensor amplitude structure") {
  SUBCASE("order-two cyclic group") {
    auto g = make_group(GroupId::zn(2));
    auto phys = make_link_space(g);
    VirtualLeg leg{make_vertex_space(g), {}};
    std::map<int, Matrix> beta = {{0, Matrix::Ones(1, 1)}, {1, Matrix::Ones(1, 1)}};
    auto t = build_link_tensor(g, phys, leg, leg, beta);
    CHECK(t.amplitudes.size() == 2);
    for (const auto& [idx, v] : t.amplitudes) CHECK(idx[0] == idx[1]);
  }
  SUBCASE("spin truncation 0, 1/2") {
    auto g = make_group(GroupId::su2());
    auto phys = make_link_space(g, std::vector<int>{0, 1});
    VirtualLeg leg{make_vertex_space(g, std::vector<int>{0, 1}), {}};
    std::map<int, Matrix> beta = {{0, Matrix::Ones(1, 1)}, {1, 2.0 * Matrix::Ones(1, 1)}};
    auto t = build_link_tensor(g, phys, leg, leg, beta);
    CHECK(t.amplitudes.size() == 5);
  }
  SUBCASE("vanishing parameter removes the sector") {
    auto g = make_group(GroupId::su2());
    auto phys = make_link_space(g, std::vector<int>{0, 1});
    VirtualLeg leg{make_vertex_space(g, std::vector<int>{0, 1}), {}};
    std::map<int, Matrix> beta = {{0, Matrix::Ones(1, 1)}, {1, Matrix::Zero(1, 1)}};
    auto t = build_link_tensor(g, phys, leg, leg, beta);
    CHECK(t.amplitudes.size() == 1);
  }
}

TEST_CASE("link tensors satisfy both transformation identities") {
  struct Backend {
    std::shared_ptr<const Group> g;
    std::optional<std::vector<int>> trunc;
  };
  std::vector<Backend> backends = {{make_group(GroupId::zn(4)), std::nullopt},
                                   {make_group(GroupId::s3()), std::nullopt},
                                   {make_group(GroupId::su2()), std::vector<int>{0, 1}}};
  int bi = 0;
  for (const auto& b : backends) {
    auto phys = make_link_space(b.g, b.trunc);
    VirtualLeg leg{make_vertex_space(b.g, b.trunc), {}};
    std::mt19937_64 rng(7 + bi);
    std::uniform_real_distribution<double> unit(0.2, 1.0);
    std::map<int, Matrix> beta;
    for (const auto& r : phys.irreps) beta[r.label] = unit(rng) * Matrix::Ones(1, 1);
    auto t = build_link_tensor(b.g, phys, leg, leg, beta);
    for (const auto& el : b.g->sample_elements(100, 53 + bi)) {
      auto res = check_symmetry_link(t, el);
      CHECK(res[0] < 1e-12);
      CHECK(res[1] < 1e-12);
    }

    // Control: tie the physical n index to the wrong leg index.
    auto wrong = t;
    wrong.amplitudes.clear();
    for (const auto& r : phys.irreps)
      for (int m = 0; m < r.dim; ++m)
        for (int n = 0; n < r.dim; ++n)
          wrong.amplitudes[{phys.index_of(r.label, m, n), leg.index_of(r.label, m, 0),
                            leg.index_of(r.label, m, 0)}] = beta[r.label](0, 0);
    double worst = 0.0;
    for (const auto& el : b.g->sample_elements(10, 61 + bi))
      worst = std::max(worst, check_symmetry_link(wrong, el)[1]);
    if (b.g->id().kind != GroupKind::CyclicZN)  // abelian case has m = n
      CHECK(worst > 1e-1);
    ++bi;
  }
}

TEST_CASE("bond states are invariant") {
  auto g = make_group(GroupId::su2());
  VirtualLeg leg{make_vertex_space(g, std::vector<int>{0, 1}), {{0, 2}, {1, 3}}};
  auto b = bond_state(BondState::Orientation::Horizontal, leg, leg);
  CHECK(std::abs(b.coefficients.norm() - 1.0) < 1e-14);
  CHECK(check_bond_invariance(b, g->identity()) < 1e-14);
  for (const auto& el : g->sample_elements(100, 5)) CHECK(check_bond_invariance(b, el) < 1e-12);

  auto s3 = make_group(GroupId::s3());
  VirtualLeg sleg{make_vertex_space(s3), {}};
  auto sb = bond_state(BondState::Orientation::Vertical, sleg, sleg);
  for (const auto& el : s3->sample_elements(100, 6)) CHECK(check_bond_invariance(sb, el) < 1e-12);

  VirtualLeg other{make_vertex_space(g, std::vector<int>{0, 1}), {{1, 2}}};
  try {
    bond_state(BondState::Orientation::Horizontal, leg, other);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LegMismatch);
  }
}

TEST_CASE("unified tensor") {
  SUBCASE("all-trivial inputs reduce to a scalar") {
    auto g = make_group(GroupId::su2());
    auto vspace = make_vertex_space(g, std::vector<int>{0});
    auto lspace = make_link_space(g, std::vector<int>{0});
    VirtualLeg leg{make_vertex_space(g, std::vector<int>{0}), {}};
    AlphaMap alpha;
    alpha[AlphaKey{0, 0, 0, 0, 0, 0, 0}] = Complex(2.0, 0.0);
    auto a = build_vertex_tensor(g, vspace, {leg, leg, leg, leg}, Ordering::A, alpha);
    std::map<int, Matrix> beta = {{0, 3.0 * Matrix::Ones(1, 1)}};
    auto b = build_link_tensor(g, lspace, leg, leg, beta);
    auto c = unify(a, b, b);
    REQUIRE(c.amplitudes.size() == 1);
    CHECK(std::abs(c.amplitudes.begin()->second - Complex(18.0, 0.0)) < 1e-13);
  }

  SUBCASE("component identifications and symmetry") {
    struct Backend {
      std::shared_ptr<const Group> g;
      std::optional<std::vector<int>> trunc;
    };
    std::vector<Backend> backends = {{make_group(GroupId::zn(5)), std::vector<int>{0, 1, 4}},
                                     {make_group(GroupId::su2()), std::vector<int>{0, 1}}};
    int bi = 0;
    for (const auto& b : backends) {
      auto vspace = make_vertex_space(b.g, b.trunc);
      auto lspace = make_link_space(b.g, b.trunc);
      VirtualLeg leg{make_vertex_space(b.g, b.trunc), {}};
      std::vector<int> labels;
      for (const auto& r : vspace.irreps) labels.push_back(r.label);
      auto alpha = random_alpha(admissible_keys(*b.g, labels, labels), 200 + bi);
      auto a = build_vertex_tensor(b.g, vspace, {leg, leg, leg, leg}, Ordering::A, alpha);
      std::mt19937_64 rng(9 + bi);
      std::uniform_real_distribution<double> unit(0.2, 1.0);
      std::map<int, Matrix> beta_s, beta_t;
      for (int l : labels) {
        beta_s[l] = unit(rng) * Matrix::Ones(1, 1);
        beta_t[l] = unit(rng) * Matrix::Ones(1, 1);
      }
      auto bs = build_link_tensor(b.g, lspace, leg, leg, beta_s);
      auto bt = build_link_tensor(b.g, lspace, leg, leg, beta_t);
      auto c = unify(a, bs, bt);
      CHECK(!c.amplitudes.empty());

      // Entrywise: C = A(l, s-left, t-left, d) * beta_s * beta_t with the
      // side/top physical n indices tied to the r/u legs.
      for (const auto& [idx, v] : c.amplitudes) {
        const auto& s_state = lspace.basis[idx[1]];
        const auto& t_state = lspace.basis[idx[2]];
        CHECK(leg.index_of(s_state.irrep, s_state.n, 0) == idx[4]);
        CHECK(leg.index_of(t_state.irrep, t_state.n, 0) == idx[5]);
        std::array<int, 5> akey = {idx[0], idx[3], leg.index_of(s_state.irrep, s_state.m, 0),
                                   leg.index_of(t_state.irrep, t_state.m, 0), idx[6]};
        auto it = a.amplitudes.find(akey);
        REQUIRE(it != a.amplitudes.end());
        Complex expect =
            it->second * beta_s[s_state.irrep](0, 0) * beta_t[t_state.irrep](0, 0);
        CHECK(std::abs(v - expect) < 1e-13);
      }

      for (const auto& el : b.g->sample_elements(100, 71 + bi)) {
        auto res = check_symmetry_unified(c, el);
        CHECK(res[0] < 1e-12);
        CHECK(res[1] < 1e-12);
        CHECK(res[2] < 1e-12);
      }
      ++bi;
    }
  }

  SUBCASE("mismatched internal bonds are rejected") {
    auto g = make_group(GroupId::su2());
    auto vspace = make_vertex_space(g, std::vector<int>{0});
    VirtualLeg leg{make_vertex_space(g, std::vector<int>{0}), {}};
    AlphaMap alpha;
    alpha[AlphaKey{0, 0, 0, 0, 0, 0, 0}] = 1.0;
    auto a = build_vertex_tensor(g, vspace, {leg, leg, leg, leg}, Ordering::A, alpha);
    auto lspace = make_link_space(g, std::vector<int>{0, 1});
    VirtualLeg big{make_vertex_space(g, std::vector<int>{0, 1}), {}};
    std::map<int, Matrix> beta = {{0, Matrix::Ones(1, 1)}, {1, Matrix::Ones(1, 1)}};
    auto b = build_link_tensor(g, lspace, big, big, beta);
    try {
      unify(a, b, b);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::LegMismatch);
    }
  }
}

TEST_CASE("degeneracy spaces preserve every invariance") {
  auto g = make_group(GroupId::su2());
  std::vector<int> labels = {0, 1};
  auto vspace = make_vertex_space(g, labels);
  auto lspace = make_link_space(g, labels);
  std::map<int, int> deg = {{0, 3}, {1, 2}};
  VirtualLeg leg{make_vertex_space(g, labels), deg};
  CHECK(leg.dim() == 3 + 2 * 2);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  AlphaMap alpha;
  for (const auto& base : admissible_keys(*g, labels, labels))
    for (int il = 0; il < deg[base.jl]; ++il)
      for (int ir = 0; ir < deg[base.jr]; ++ir)
        for (int iu = 0; iu < deg[base.ju]; ++iu)
          for (int id = 0; id < deg[base.jd]; ++id) {
            AlphaKey k = base;
            k.deg = {il, ir, iu, id};
            alpha[k] = Complex(unit(rng), unit(rng));
          }
  auto a = build_vertex_tensor(g, vspace, {leg, leg, leg, leg}, Ordering::A, alpha);
  for (const auto& el : g->sample_elements(100, 83)) CHECK(check_symmetry_vertex(a, el) < 1e-12);

  std::map<int, Matrix> beta_s, beta_t;
  for (int l : labels) {
    Matrix m(deg[l], deg[l]);
    for (int r = 0; r < deg[l]; ++r)
      for (int c = 0; c < deg[l]; ++c) m(r, c) = Complex(unit(rng), unit(rng));
    beta_s[l] = m;
    beta_t[l] = m * Complex(0.0, 1.0);
  }
  auto bs = build_link_tensor(g, lspace, leg, leg, beta_s);
  auto bt = build_link_tensor(g, lspace, leg, leg, beta_t);
  for (const auto& el : g->sample_elements(100, 89)) {
    auto res = check_symmetry_link(bs, el);
    CHECK(res[0] < 1e-12);
    CHECK(res[1] < 1e-12);
  }
  auto c = unify(a, bs, bt);
  for (const auto& el : g->sample_elements(100, 97)) {
    auto res = check_symmetry_unified(c, el);
    CHECK(res[0] < 1e-12);
    CHECK(res[1] < 1e-12);
    CHECK(res[2] < 1e-12);
  }
}

TEST_CASE("the three coupling orders build the same tensor") {
  auto g = make_group(GroupId::su2());
  std::vector<int> labels = {0, 1, 2};
  auto vspace = make_vertex_space(g, labels);
  std::map<int, int> deg = {{0, 1}, {1, 3}, {2, 2}};
  VirtualLeg leg{make_vertex_space(g, labels), deg};

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  AlphaMap alpha;
  for (const auto& base : admissible_keys(*g, labels, labels)) {
    AlphaKey k = base;
    k.deg = {0, std::min(1, deg[base.jr] - 1), 0, std::min(1, deg[base.jd] - 1)};
    alpha[k] = Complex(unit(rng), unit(rng));
  }
  auto a = build_vertex_tensor(g, vspace, {leg, leg, leg, leg}, Ordering::A, alpha);

  for (auto to : {Ordering::ATilde, Ordering::AHat}) {
    auto mapped = reparameterize(alpha, Ordering::A, to);
    auto other = build_vertex_tensor(g, vspace, {leg, leg, leg, leg}, to, mapped);
    CHECK((dense(a) - dense(other)).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& el : g->sample_elements(20, 101))
      CHECK(check_symmetry_vertex(other, el) < 1e-12);
  }
}
