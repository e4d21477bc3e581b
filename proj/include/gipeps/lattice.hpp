#pragma once

#include "gipeps/fermion.hpp"
#include "gipeps/tensors.hpp"

namespace gipeps {

// --- bosonic lattices ----------------------------------------------------

// A vertex tensor ready for lattice assembly: the physical slot may carry
// degeneracy copies (e.g. a doubled trivial sector), hence a VirtualLeg.
struct LatticeVertex {
  VirtualLeg physical;
  std::map<std::array<int, 5>, Complex> amplitudes;  // (p, l, r, u, d)
};

LatticeVertex lattice_vertex(const VertexTensor& t);
// SU(2)-style doubling of the trivial physical sector: the second copy takes
// the same j = 0 amplitudes scaled by tau_p.
LatticeVertex lattice_vertex_with_pair_channel(const VertexTensor& t, Complex tau_p);

struct LatticeSpec {
  enum class Boundary { Open, Periodic };

  int lx = 1, ly = 1;
  Boundary boundary = Boundary::Open;
  std::shared_ptr<const Group> group;
  LinkSpace link_physical;
  VirtualLeg leg;                      // uniform virtual bond
  std::vector<LatticeVertex> vertices; // row-major, index y*lx + x
  std::map<int, Matrix> beta;

  int sites() const { return lx * ly; }
  int hlinks() const { return (boundary == Boundary::Open ? lx - 1 : lx) * ly; }
  int vlinks() const { return lx * (boundary == Boundary::Open ? ly - 1 : ly); }

  // Physical slot numbering: vertices, then horizontal links (from (x,y) to
  // the right), then vertical links (upward); -1 where no link exists.
  int vertex_slot(int x, int y) const { return y * lx + x; }
  int hlink_slot(int x, int y) const;
  int vlink_slot(int x, int y) const;
};

struct LatticeState {
  std::vector<int> dims;  // per physical slot, matching the slot numbering
  Vector coefficients;
};

LatticeState contract(const LatticeSpec& spec);

// One-slot matrix factors on distinct slots; a gauge operator is their
// product, a generator a sum of such terms.
using SlotFactors = std::vector<std::pair<int, Matrix>>;

struct GaugeOperator {
  SlotFactors factors;
};

GaugeOperator gauge_operator(const LatticeSpec& spec, int x, int y, const GroupElement& g);

Vector apply_product(const LatticeState& state, const SlotFactors& factors);
Vector apply_sum(const LatticeState& state, const SlotFactors& terms);

double check_local_invariance(const LatticeState& state, const LatticeSpec& spec, int x, int y,
                              const GroupElement& g);

// Hermitian Gauss generators at a vertex: three for SU(2), one for Z_N
// (labels read as symmetric charges). Each generator is a sum of one-slot
// terms.
std::vector<SlotFactors> gauss_generators(const LatticeSpec& spec, int x, int y);

// Per-slot exponential exp(i sum_a q_a G_a) of a generator set, for
// comparison against gauge_operator.
GaugeOperator exp_generators(const std::vector<SlotFactors>& gens, const std::array<double, 3>& q);

// --- fermionic lattices --------------------------------------------------

// Assembled physical state of a fermionic lattice: matter occupation bits
// (bit s = site s, row-major) joint with one bosonic field slot per internal
// link (horizontal links first, row-major).
struct FermAssembly {
  int n_sites = 0;
  BosonSpaces links;  // empty dims when ungauged
  JointState physical;
};

// Single-mode matter with staggered charge on an open lx x ly lattice.
struct FermU1Spec {
  int lx = 2, ly = 2;
  std::vector<int> eps;                            // per site, row-major
  std::vector<std::map<unsigned, Complex>> alpha;  // per site
};

FermAssembly assemble_ferm_u1(const FermU1Spec& spec, bool gauged);

// Two sites joined by one horizontal link, spin-1/2 matter doublets.
FermAssembly assemble_ferm_su2_pair(const std::array<AlphaMap, 2>& alpha,
                                    const std::array<std::array<Complex, 5>, 2>& tau, bool gauged);

// Max commutator norm of the realized hopping term psi^dag(x) U psi(x+k) +
// h.c. with the local gauge transformations at both ends, over sampled group
// elements. transpose_u swaps the U indices as a negative control.
double tunneling_invariance(std::shared_ptr<const Group> group, const std::vector<int>& truncation,
                            int matter_label, int samples, std::uint64_t seed, bool transpose_u);

}  // namespace gipeps
