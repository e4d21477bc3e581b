#pragma once

#include <array>
#include <compare>
#include <map>

#include "gipeps/group.hpp"

namespace gipeps {

// Fusion-order conventions for the five-leg vertex tensor. `A` couples
// (l,d) first, `ATilde` couples (d,p) first, `AHat` couples (l,p) first;
// all three close with the same (r,u) splitting.
enum class Ordering { A, ATilde, AHat };

// Basis-change matrix for regrouping (a x b) x c -> a x (b x c) inside a
// fixed total sector; all labels are doubled SU(2) spins. Rows run over the
// intermediate labels of the left-grouped chain, columns over those of the
// right-grouped one.
struct FMatrix {
  int ja = 0, jb = 0, jc = 0, j_total = 0;
  std::vector<int> rows;  // admissible (a x b) intermediates
  std::vector<int> cols;  // admissible (b x c) intermediates
  RealMatrix f;

  int row_index(int j1) const;
  int col_index(int j1) const;
};

FMatrix f_move(int ja, int jb, int jc, int j_total);

// Sign picked up when the two fusing representations swap places.
double exchange(int ja, int jb, int jc);

// Variational-parameter key: fusion labels plus one degeneracy slot per
// virtual leg (l, r, u, d).
struct AlphaKey {
  int jp = 0, j1 = 0, j2 = 0;
  int jl = 0, jr = 0, ju = 0, jd = 0;
  std::array<int, 4> deg{0, 0, 0, 0};

  auto operator<=>(const AlphaKey&) const = default;
};

using AlphaMap = std::map<AlphaKey, Complex>;

// Re-express the parameters of one fusion ordering in another so that the
// assembled vertex tensors agree entrywise.
AlphaMap reparameterize(const AlphaMap& alpha, Ordering from, Ordering to);

}  // namespace gipeps
