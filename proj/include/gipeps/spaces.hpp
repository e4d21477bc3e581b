#pragma once

#include <memory>
#include <vector>

#include "gipeps/group.hpp"

namespace gipeps {

// Basis ordering everywhere: irrep-major (label-sorted), then m ascending,
// then (for links) n ascending; degeneracy indices, where present, innermost.

struct VertexBasisState {
  int irrep;  // label
  int m;      // 0..dim-1
};

struct LinkBasisState {
  int irrep;
  int m;  // left index, 0..dim-1
  int n;  // right index, 0..dim-1
};

struct VertexSpace {
  std::shared_ptr<const Group> group;
  std::vector<Irrep> irreps;
  std::vector<VertexBasisState> basis;
  int dim = 0;

  int index_of(int label, int m) const;
};

struct LinkSpace {
  std::shared_ptr<const Group> group;
  std::vector<Irrep> irreps;
  std::vector<LinkBasisState> basis;
  int dim = 0;

  int index_of(int label, int m, int n) const;
  bool has_irrep(int label) const;
};

VertexSpace make_vertex_space(std::shared_ptr<const Group> group,
                              const std::optional<std::vector<int>>& truncation = std::nullopt);
LinkSpace make_link_space(std::shared_ptr<const Group> group,
                          const std::optional<std::vector<int>>& truncation = std::nullopt);

enum class Side { Right, Left };  // Right: Theta_g, Left: tilde-Theta_g

// Transformation operator matrices in the fixed basis ordering.
// On a vertex space the right operator carries blocks D^j(g) and the left
// operator blocks D^j(g)^T; on a link space the right operator acts on the
// n index and the left operator on the m index.
Matrix theta(const VertexSpace& space, Side side, const GroupElement& g);
Matrix theta(const LinkSpace& space, Side side, const GroupElement& g);

// The link operator U^j expanded over the truncated representation basis.
struct LinkOperatorU {
  int j = 0;
  int dim_j = 1;
  // blocks[m * dim_j + n] is the (space dim) x (space dim) matrix U^j_{mn}.
  std::vector<Matrix> blocks;

  const Matrix& block(int m, int n) const { return blocks[m * dim_j + n]; }
};

LinkOperatorU link_operator_u(const LinkSpace& space, int j);

// Single operator on (color x link) space assembled from the U^j blocks;
// unitary for a finite group at full truncation.
Matrix link_operator_u_full(const LinkSpace& space, int j);

// <g|jmn> transform matrix for finite groups at full truncation; square
// unitary of size |G|.
Matrix group_element_transform(const LinkSpace& space);

struct Su2VertexGenerators {
  std::array<Matrix, 3> q;  // x, y, z
};

struct Su2LinkGenerators {
  std::array<Matrix, 3> l;  // left electric field, acts on the m index
  std::array<Matrix, 3> r;  // right electric field, acts on the n index
};

Su2VertexGenerators su2_generators(const VertexSpace& space);
Su2LinkGenerators su2_generators(const LinkSpace& space);

}  // namespace gipeps
