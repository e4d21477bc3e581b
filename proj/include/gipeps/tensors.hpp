#pragma once

#include <array>

#include "gipeps/recoupling.hpp"
#include "gipeps/spaces.hpp"

namespace gipeps {

// Virtual bond space: a set of irreps, each optionally repeated through a
// degeneracy slot. Index layout is irrep-major, m-major, degeneracy
// innermost.
struct VirtualLeg {
  VertexSpace space;
  std::map<int, int> degeneracy;  // label -> copies; absent means 1

  struct State {
    int irrep, m, deg;
  };

  int copies(int label) const;
  int dim() const;
  int index_of(int label, int m, int deg) const;
  std::vector<State> states() const;
};

bool same_leg(const VirtualLeg& a, const VirtualLeg& b);

// Bond transformation with each Wigner entry lifted to an identity block on
// the degeneracy slot.
Matrix leg_theta(const VirtualLeg& leg, Side side, const GroupElement& g);

struct VertexLegs {
  VirtualLeg l, r, u, d;
};

// Five-leg fiducial tensor on a vertex; amplitudes keyed (p, l, r, u, d).
struct VertexTensor {
  std::shared_ptr<const Group> group;
  VertexSpace physical;
  VertexLegs legs;
  Ordering ordering = Ordering::A;
  AlphaMap params;
  std::map<std::array<int, 5>, Complex> amplitudes;
};

// Three-leg fiducial tensor on a link; amplitudes keyed (p, a, b) where a is
// the left/down edge and b the right/up edge.
struct LinkTensor {
  std::shared_ptr<const Group> group;
  LinkSpace physical;
  VirtualLeg a, b;
  std::map<int, Matrix> beta;  // label -> copies x copies parameter block
  std::map<std::array<int, 3>, Complex> amplitudes;
};

// Vertex and two link tensors merged over the internal bonds; amplitudes
// keyed (p, s, t, l, r, u, d) with s/t the side/top link physical states.
struct UnifiedTensor {
  std::shared_ptr<const Group> group;
  VertexSpace vertex_physical;
  LinkSpace side_physical, top_physical;
  VertexLegs legs;
  std::map<std::array<int, 7>, Complex> amplitudes;
};

struct BondState {
  enum class Orientation { Horizontal, Vertical };
  Orientation orientation = Orientation::Horizontal;
  VirtualLeg leg;
  Vector coefficients;  // over (outgoing edge) x (ingoing edge)
};

VertexTensor build_vertex_tensor(std::shared_ptr<const Group> group, const VertexSpace& physical,
                                 const VertexLegs& legs, Ordering ordering,
                                 const AlphaMap& params);

LinkTensor build_link_tensor(std::shared_ptr<const Group> group, const LinkSpace& physical,
                             const VirtualLeg& a, const VirtualLeg& b,
                             const std::map<int, Matrix>& beta);

UnifiedTensor unify(const VertexTensor& a, const LinkTensor& side, const LinkTensor& top);

BondState bond_state(BondState::Orientation orientation, const VirtualLeg& out_edge,
                     const VirtualLeg& in_edge);

// Residual norms of the defining transformation identities at one group
// element; zero (to tolerance) certifies invariance.
double check_symmetry_vertex(const VertexTensor& t, const GroupElement& g);
std::array<double, 2> check_symmetry_link(const LinkTensor& t, const GroupElement& g);
std::array<double, 3> check_symmetry_unified(const UnifiedTensor& t, const GroupElement& g);
double check_bond_invariance(const BondState& b, const GroupElement& g);

// Apply a one-slot operator to a dense multi-index vector (row-major slots).
Vector apply_slot(const Vector& v, const std::vector<int>& dims, int slot, const Matrix& m);

// Dense expansions of the sparse amplitude maps, slot order as keyed.
Vector dense(const VertexTensor& t);
Vector dense(const LinkTensor& t);
Vector dense(const UnifiedTensor& t);

}  // namespace gipeps
