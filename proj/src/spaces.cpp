#include "gipeps/spaces.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace gipeps {

namespace {

// Block-diagonal assembly: one square block per irrep, block size given by
// per-irrep dimension of the enclosing space (d for vertex, d^2 for link).
Matrix assemble_blocks(const std::vector<Matrix>& blocks, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  int off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += static_cast<int>(b.rows());
  }
  return out;
}

}  // namespace

int VertexSpace::index_of(int label, int m) const {
  int off = 0;
  for (const auto& r : irreps) {
    if (r.label == label) return off + m;
    off += r.dim;
  }
  throw Error(Errc::UnknownLabel, "irrep label not present in vertex space");
}

int LinkSpace::index_of(int label, int m, int n) const {
  int off = 0;
  for (const auto& r : irreps) {
    if (r.label == label) return off + m * r.dim + n;
    off += r.dim * r.dim;
  }
  throw Error(Errc::UnknownLabel, "irrep label not present in link space");
}

bool LinkSpace::has_irrep(int label) const {
  for (const auto& r : irreps)
    if (r.label == label) return true;
  return false;
}

VertexSpace make_vertex_space(std::shared_ptr<const Group> group,
                              const std::optional<std::vector<int>>& truncation) {
  VertexSpace s;
  s.group = group;
  s.irreps = group->irreps(truncation);
  for (const auto& r : s.irreps)
    for (int m = 0; m < r.dim; ++m) s.basis.push_back({r.label, m});
  s.dim = static_cast<int>(s.basis.size());
  return s;
}

LinkSpace make_link_space(std::shared_ptr<const Group> group,
                          const std::optional<std::vector<int>>& truncation) {
  LinkSpace s;
  s.group = group;
  s.irreps = group->irreps(truncation);
  for (const auto& r : s.irreps)
    for (int m = 0; m < r.dim; ++m)
      for (int n = 0; n < r.dim; ++n) s.basis.push_back({r.label, m, n});
  s.dim = static_cast<int>(s.basis.size());
  return s;
}

Matrix theta(const VertexSpace& space, Side side, const GroupElement& g) {
  std::vector<Matrix> blocks;
  for (const auto& r : space.irreps) {
    Matrix d = space.group->wigner_d(r.label, g);
    if (side == Side::Left) d.transposeInPlace();
    blocks.push_back(d);
  }
  return assemble_blocks(blocks, space.dim);
}

Matrix theta(const LinkSpace& space, Side side, const GroupElement& g) {
  std::vector<Matrix> blocks;
  for (const auto& r : space.irreps) {
    Matrix d = space.group->wigner_d(r.label, g);
    Matrix id = Matrix::Identity(r.dim, r.dim);
    if (side == Side::Right)
      blocks.emplace_back(Eigen::kroneckerProduct(id, d));  // acts on n
    else
      blocks.emplace_back(Eigen::kroneckerProduct(d.transpose(), id));  // acts on m
  }
  return assemble_blocks(blocks, space.dim);
}

LinkOperatorU link_operator_u(const LinkSpace& space, int j) {
  const Irrep rep_j = space.group->irrep(j);  // validates the label
  LinkOperatorU u;
  u.j = j;
  u.dim_j = rep_j.dim;
  u.blocks.assign(rep_j.dim * rep_j.dim, Matrix::Zero(space.dim, space.dim));

  bool any = false;
  for (const auto& rj : space.irreps) {          // source irrep J
    for (int k : space.group->fusion(rj.label, j)) {  // target irrep K
      if (!space.has_irrep(k)) continue;
      const Irrep rk = space.group->irrep(k);
      const double scale = std::sqrt(static_cast<double>(rj.dim) / rk.dim);
      CGTable cg = space.group->clebsch_gordan(rj.label, j);
      for (int m = 0; m < rep_j.dim; ++m)
        for (int n = 0; n < rep_j.dim; ++n) {
          Matrix& blk = u.blocks[m * rep_j.dim + n];
          for (int bm = 0; bm < rj.dim; ++bm)
            for (int bn = 0; bn < rj.dim; ++bn) {
              const int col = space.index_of(rj.label, bm, bn);
              for (int nm = 0; nm < rk.dim; ++nm)
                for (int nn = 0; nn < rk.dim; ++nn) {
                  const double v =
                      scale * cg.coeff(bm, m, k, nm) * cg.coeff(bn, n, k, nn);
                  if (v == 0.0) continue;
                  blk(space.index_of(k, nm, nn), col) += v;
                  any = true;
                }
            }
        }
    }
  }
  if (!any)
    throw Error(Errc::EmptyResult,
                "link operator vanishes identically on this truncated space");
  return u;
}

Matrix link_operator_u_full(const LinkSpace& space, int j) {
  LinkOperatorU u = link_operator_u(space, j);
  const int dj = u.dim_j;
  Matrix full = Matrix::Zero(dj * space.dim, dj * space.dim);
  for (int m = 0; m < dj; ++m)
    for (int n = 0; n < dj; ++n)
      full.block(m * space.dim, n * space.dim, space.dim, space.dim) = u.block(m, n);
  return full;
}

Matrix group_element_transform(const LinkSpace& space) {
  if (!space.group->finite())
    throw Error(Errc::FiniteGroupOnly,
                "group-element basis exists only for finite groups");
  const int order = space.group->order();
  if (space.dim != order)
    throw Error(Errc::IncompleteTruncation,
                "group-element basis needs the full set of irreps");
  const auto els = space.group->elements();
  Matrix t(order, space.dim);
  for (int gi = 0; gi < order; ++gi) {
    int col = 0;
    for (const auto& r : space.irreps) {
      Matrix d = space.group->wigner_d(r.label, els[gi]);
      const double scale = std::sqrt(static_cast<double>(r.dim) / order);
      for (int m = 0; m < r.dim; ++m)
        for (int n = 0; n < r.dim; ++n) t(gi, col++) = scale * d(m, n);
    }
  }
  return t;
}

Su2VertexGenerators su2_generators(const VertexSpace& space) {
  if (space.group->id().kind != GroupKind::SU2)
    throw Error(Errc::SU2Only, "spin generators are defined for SU(2) spaces only");
  Su2VertexGenerators gen;
  for (int a = 0; a < 3; ++a) {
    std::vector<Matrix> blocks;
    for (const auto& r : space.irreps) blocks.push_back(su2_spin_matrices(r.label)[a]);
    gen.q[a] = assemble_blocks(blocks, space.dim);
  }
  return gen;
}

Su2LinkGenerators su2_generators(const LinkSpace& space) {
  if (space.group->id().kind != GroupKind::SU2)
    throw Error(Errc::SU2Only, "spin generators are defined for SU(2) spaces only");
  Su2LinkGenerators gen;
  for (int a = 0; a < 3; ++a) {
    std::vector<Matrix> lblocks, rblocks;
    for (const auto& r : space.irreps) {
      Matrix ja = su2_spin_matrices(r.label)[a];
      Matrix id = Matrix::Identity(r.dim, r.dim);
      lblocks.emplace_back(Eigen::kroneckerProduct(ja.transpose(), id));
      rblocks.emplace_back(Eigen::kroneckerProduct(id, ja));
    }
    gen.l[a] = assemble_blocks(lblocks, space.dim);
    gen.r[a] = assemble_blocks(rblocks, space.dim);
  }
  return gen;
}

}  // namespace gipeps
