#include "gipeps/recoupling.hpp"

#include <cmath>

namespace gipeps {

namespace {

bool triangle(int ta, int tb, int tc) {
  return tc >= std::abs(ta - tb) && tc <= ta + tb && (ta + tb + tc) % 2 == 0;
}

int find_label(const std::vector<int>& v, int j) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] == j) return static_cast<int>(i);
  throw Error(Errc::InadmissibleFusionKey, "intermediate label outside the admissible set");
}

}  // namespace

int FMatrix::row_index(int j1) const { return find_label(rows, j1); }
int FMatrix::col_index(int j1) const { return find_label(cols, j1); }

FMatrix f_move(int ja, int jb, int jc, int j_total) {
  if (ja < 0 || jb < 0 || jc < 0 || j_total < 0)
    throw Error(Errc::UnknownLabel, "labels must be nonnegative doubled spins");
  FMatrix out;
  out.ja = ja;
  out.jb = jb;
  out.jc = jc;
  out.j_total = j_total;
  for (int j1 = std::abs(ja - jb); j1 <= ja + jb; j1 += 2)
    if (triangle(j1, jc, j_total)) out.rows.push_back(j1);
  for (int j1 = std::abs(jb - jc); j1 <= jb + jc; j1 += 2)
    if (triangle(ja, j1, j_total)) out.cols.push_back(j1);
  out.f = RealMatrix::Zero(out.rows.size(), out.cols.size());
  const int phase_pow = (ja + jb + jc + j_total) / 2;
  const double phase = (phase_pow % 2 == 0) ? 1.0 : -1.0;
  for (size_t r = 0; r < out.rows.size(); ++r)
    for (size_t c = 0; c < out.cols.size(); ++c)
      out.f(r, c) = phase * std::sqrt(double(out.rows[r] + 1) * double(out.cols[c] + 1)) *
                    six_j(ja, jb, out.rows[r], jc, j_total, out.cols[c]);
  return out;
}

double exchange(int ja, int jb, int jc) {
  if (!triangle(ja, jb, jc)) return 0.0;
  return ((ja + jb - jc) / 2) % 2 == 0 ? 1.0 : -1.0;
}

namespace {

// Per-sector map alpha -> alpha' as a matrix over the intermediate label
// sets, so that the assembled tensors coincide. Derived by rewriting one
// coupling chain in the basis of the other.
struct SectorMove {
  std::vector<int> from_labels, to_labels;
  RealMatrix m;
};

SectorMove sector_matrix(int jl, int jd, int jp, int j2, Ordering from, Ordering to) {
  // Intermediate label spaces: A couples (l,d), ATilde (d,p), AHat (l,p).
  auto to_a_tilde = [&]() {
    FMatrix f = f_move(jl, jd, jp, j2);
    return SectorMove{f.rows, f.cols, f.f.transpose()};
  };
  auto tilde_to_hat = [&]() {
    // Swap the (d,p) pair, then regroup with l in front.
    FMatrix flpd = f_move(jl, jp, jd, j2);
    SectorMove mv;
    mv.from_labels = flpd.cols;  // (p,d) = (d,p) intermediates
    mv.to_labels = flpd.rows;    // (l,p) intermediates
    RealMatrix sign = RealMatrix::Zero(mv.from_labels.size(), mv.from_labels.size());
    for (size_t k = 0; k < mv.from_labels.size(); ++k)
      sign(k, k) = exchange(jd, jp, mv.from_labels[k]);
    mv.m = flpd.f * sign;
    return mv;
  };
  auto compose = [](const SectorMove& second, const SectorMove& first) {
    return SectorMove{first.from_labels, second.to_labels, second.m * first.m};
  };
  auto invert = [](const SectorMove& mv) {
    // All moves here are orthogonal maps between equal-sized label sets.
    return SectorMove{mv.to_labels, mv.from_labels, mv.m.transpose()};
  };

  switch (from) {
    case Ordering::A:
      if (to == Ordering::ATilde) return to_a_tilde();
      if (to == Ordering::AHat) return compose(tilde_to_hat(), to_a_tilde());
      break;
    case Ordering::ATilde:
      if (to == Ordering::A) return invert(to_a_tilde());
      if (to == Ordering::AHat) return tilde_to_hat();
      break;
    case Ordering::AHat:
      if (to == Ordering::A) return invert(compose(tilde_to_hat(), to_a_tilde()));
      if (to == Ordering::ATilde) return invert(tilde_to_hat());
      break;
  }
  // from == to
  FMatrix f = f_move(jl, jd, jp, j2);
  std::vector<int> labels = from == Ordering::A       ? f.rows
                            : from == Ordering::ATilde ? f.cols
                                                       : f_move(jl, jp, jd, j2).rows;
  return SectorMove{labels, labels,
                    RealMatrix::Identity(labels.size(), labels.size())};
}

}  // namespace

AlphaMap reparameterize(const AlphaMap& alpha, Ordering from, Ordering to) {
  AlphaMap out;
  // Group keys by everything except the first intermediate label.
  std::map<AlphaKey, std::map<int, Complex>> sectors;
  for (const auto& [key, value] : alpha) {
    AlphaKey sector = key;
    sector.j1 = -1;
    sectors[sector][key.j1] = value;
  }
  for (const auto& [sector, entries] : sectors) {
    SectorMove mv = sector_matrix(sector.jl, sector.jd, sector.jp, sector.j2, from, to);
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(mv.from_labels.size());
    for (const auto& [j1, value] : entries) {
      size_t k = 0;
      while (k < mv.from_labels.size() && mv.from_labels[k] != j1) ++k;
      if (k == mv.from_labels.size())
        throw Error(Errc::InadmissibleFusionKey,
                    "parameter keyed by a fusion-forbidden intermediate label");
      in(k) = value;
    }
    Eigen::VectorXcd res = mv.m.cast<Complex>() * in;
    for (size_t k = 0; k < mv.to_labels.size(); ++k) {
      if (std::abs(res(k)) < 1e-15) continue;
      AlphaKey key = sector;
      key.j1 = mv.to_labels[k];
      out[key] = res(k);
    }
  }
  return out;
}

}  // namespace gipeps
