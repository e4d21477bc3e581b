#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gipeps/error.hpp"

namespace gipeps {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

enum class GroupKind { CyclicZN, SymmetricS3, SU2 };

struct GroupId {
  GroupKind kind = GroupKind::CyclicZN;
  int order = 2;  // Z_N only

  static GroupId zn(int n) { return {GroupKind::CyclicZN, n}; }
  static GroupId s3() { return {GroupKind::SymmetricS3, 0}; }
  static GroupId su2() { return {GroupKind::SU2, 0}; }
};

enum class FermionParity { Even, Odd, Unassigned };

// Irrep labels are plain integers per backend:
//   Z_N : the charge 0..N-1
//   S3  : 0 = trivial, 1 = sign, 2 = standard
//   SU2 : twice the spin (so label 1 means j = 1/2)
struct Irrep {
  int label = 0;
  int dim = 1;
  FermionParity parity = FermionParity::Unassigned;
  // Reserved outer-multiplicity slot; always empty for Z_N, S3, SU(2),
  // whose fusion is multiplicity-free.
  std::optional<int> multiplicity;
};

// Finite groups address elements by index; SU(2) uses Euler angles
// (alpha, beta, gamma) with alpha, gamma in [0, 4pi), beta in [0, pi].
struct GroupElement {
  int index = 0;
  std::array<double, 3> euler{0.0, 0.0, 0.0};
};

// One j_a x j_b fusion slice of the Clebsch-Gordan table, stored as the
// isometry from the product space into each target channel.
// isometry[c] has shape (dim_a*dim_b) x dim_c with row index ia*dim_b+ib.
struct CGTable {
  GroupId group;
  int a = 0, b = 0;
  std::vector<int> channels;
  std::map<int, RealMatrix> isometry;

  double coeff(int ia, int ib, int c, int ic) const {
    auto it = isometry.find(c);
    if (it == isometry.end()) return 0.0;
    return it->second(ia * dim_b + ib, ic);
  }
  int dim_a = 1, dim_b = 1;
};

class Group {
 public:
  virtual ~Group() = default;

  const GroupId& id() const { return id_; }
  bool finite() const { return id_.kind != GroupKind::SU2; }

  virtual int order() const;
  virtual std::vector<Irrep> all_irreps() const;

  // Label-sorted irrep list, restricted to `truncation` when given.
  std::vector<Irrep> irreps(const std::optional<std::vector<int>>& truncation = std::nullopt) const;
  Irrep irrep(int label) const;

  virtual Matrix wigner_d(int label, const GroupElement& g) const = 0;
  virtual std::vector<int> fusion(int a, int b) const = 0;
  virtual double cg(int a, int ia, int b, int ib, int c, int ic) const = 0;
  CGTable clebsch_gordan(int a, int b) const;

  double casimir(int label) const;

  virtual GroupElement identity() const = 0;
  virtual GroupElement compose(const GroupElement& g, const GroupElement& h) const = 0;
  virtual GroupElement inverse(const GroupElement& g) const = 0;

  virtual std::vector<GroupElement> elements() const;
  // Seed-reproducible random elements: Haar-uniform Euler angles for SU(2),
  // uniform over the element list for finite groups.
  virtual std::vector<GroupElement> sample_elements(int count, std::uint64_t seed) const = 0;

  // m-value bookkeeping for SU(2): index i in 0..dim-1 maps to 2m = 2*i - label.
  static int su2_two_m(int label, int i) { return 2 * i - label; }
  static int su2_m_index(int label, int two_m) { return (two_m + label) / 2; }

 protected:
  explicit Group(GroupId id) : id_(id) {}
  GroupId id_;
};

std::shared_ptr<const Group> make_group(GroupId id);

// Exact Wigner 6j symbol for SU(2); labels are twice the spins.
// Returns 0 for triangle-violating inputs.
double six_j(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6);

// Exact SU(2) Clebsch-Gordan coefficient <j1 m1 j2 m2 | j3 m3> in the
// Condon-Shortley convention; all arguments are doubled (2j, 2m).
double su2_cg(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3);

// Spin matrices {J_x, J_y, J_z} for a doubled label, m-ascending basis.
std::array<Matrix, 3> su2_spin_matrices(int label);

// SU(2) element whose Wigner matrices are D^j(g) = exp(i q . J^j); used to
// match exp(i q . R) and exp(i q . L) against the theta operators.
GroupElement su2_element_from_parameters(const std::array<double, 3>& q);

}  // namespace gipeps
