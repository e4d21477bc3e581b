#pragma once

#include <cstdint>
#include <utility>

#include "gipeps/recoupling.hpp"
#include "gipeps/spaces.hpp"

namespace gipeps {

// Second-quantized operators over a fixed ordered list of fermionic modes,
// optionally carrying matrix factors on auxiliary bosonic slots. Mode
// indices refer to positions in that canonical ordering; sign strings follow
// the Jordan-Wigner convention for it.

struct FermionTerm {
  Complex coeff{1.0, 0.0};
  // (mode, creation?) pairs; the leftmost factor acts last.
  std::vector<std::pair<int, bool>> ops;
  // Bosonic slot -> accumulated matrix factor for this term.
  std::map<int, Matrix> boson;
};

struct FockOperator {
  std::vector<FermionTerm> terms;
};

// True when every term contains an even number of fermionic factors.
bool even_parity(const FockOperator& op);

// Renumber modes (local vertex layout -> global lattice layout).
FockOperator remap_modes(const FockOperator& op, const std::vector<int>& mode_map);

FockOperator multiply(const FockOperator& a, const FockOperator& b);

FockOperator adjoint(const FockOperator& op);

// Sum_{ij} a_i^dag M_ij a_j over the listed modes.
FockOperator quadratic(const std::vector<int>& modes, const Matrix& m);

// --- sparse states -------------------------------------------------------

using FermionState = std::map<std::uint64_t, Complex>;

struct BosonSpaces {
  std::vector<int> dims;

  std::uint64_t encode(const std::vector<int>& idx) const;
  std::vector<int> decode(std::uint64_t code) const;
};

using JointKey = std::pair<std::uint64_t, std::uint64_t>;  // fermion mask, boson code
using JointState = std::map<JointKey, Complex>;

FermionState apply(const FockOperator& op, const FermionState& state);
JointState apply(const FockOperator& op, const JointState& state, const BosonSpaces& bosons);

// --- matrix realizations -------------------------------------------------

enum class FockSector { Full, Even, Odd };

struct FockBasis {
  int n_modes = 0;
  std::vector<std::uint64_t> states;
  std::map<std::uint64_t, int> index;
};

FockBasis fock_space(int n_modes, FockSector sector = FockSector::Full);

// Purely fermionic terms only.
Matrix realize(const FockOperator& op, const FockBasis& basis);
Matrix mode_matrix(int mode, bool dagger, const FockBasis& basis);

// Second-quantized representation of a one-body unitary d over the listed
// modes (a_m^dag -> sum_n d_nm a_n^dag); other modes untouched.
Matrix fock_rep(const std::vector<int>& modes, const Matrix& d, const FockBasis& basis);

// --- vertex fiducial operators -------------------------------------------

// Local mode layouts. Legs are numbered 0 = left, 1 = right, 2 = up,
// 3 = down; within a multiplet the m index ascends.
struct U1VertexModes {
  static constexpr int count = 9;
  static constexpr int psi = 0;
  static int plus(int leg) { return 1 + 2 * leg; }
  static int minus(int leg) { return 2 + 2 * leg; }
};

struct Su2VertexModes {
  static constexpr int count = 10;
  static int psi(int mi) { return mi; }
  static int leg(int a, int mi) { return 2 + 2 * a + mi; }
};

struct Su2bVertexModes {
  static constexpr int count = 22;
  static int psi(int mi) { return mi; }
  static int half(int a, int mi) { return 2 + 5 * a + mi; }
  static int triplet(int a, int mi) { return 2 + 5 * a + 2 + mi; }
};

// Electric-charge fiducial operator: occupation amplitudes filtered by the
// charge-balance rule. Keys are 9-bit occupation masks over U1VertexModes;
// epsilon = +-1 staggers the matter charge.
FockOperator fiducial_u1(int epsilon, const std::map<unsigned, Complex>& alpha);

// Spin-1/2 truncation; tau = redundancy amplitudes for the trivial sector,
// ordered (p, l, r, u, d).
FockOperator fiducial_su2(const AlphaMap& alpha, const std::array<Complex, 5>& tau);

// Truncation with spins up to 1: integer-spin legs realized as single holes
// over the filled triplet.
FockOperator fiducial_su2b(const AlphaMap& alpha, Complex tau_p);

// prod_pairs [1 + a^dag b^dag]; each pair is (first, second) in the order
// the two creation operators appear.
FockOperator bond_projector(const std::vector<std::pair<int, int>>& pairs);

// --- gauging -------------------------------------------------------------

// Replace creation operators on `modes` (one per m index) with
// sum_n blocks[m * dim + n] (x) modes[n]^dag on the given bosonic slot.
struct GaugeSub {
  int slot = 0;
  int dim = 1;
  std::vector<int> modes;
  std::vector<Matrix> blocks;
};

FockOperator gauge_fiducial(const FockOperator& op, const std::vector<GaugeSub>& subs);

// Electric-field matrices on the 3-dim link space, basis {|+1>, |0>, |-1>}.
Matrix sigma_z();
Matrix sigma_plus();
Matrix sigma_minus();

}  // namespace gipeps
