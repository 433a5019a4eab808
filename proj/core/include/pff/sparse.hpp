#pragma once

// Symmetric sparse matrix stored as its lower triangle (column-major CSC).
// The pattern is fixed when the matrix is created from element DOF lists;
// element contributions are scattered through precomputed value offsets.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

namespace pff {

class SparseSymMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  SparseSymMatrix() = default;

  /// Pattern from element DOF lists; negative indices are skipped.
  /// scatter[e] receives, for every local pair (a, b) in row-major order
  /// over an n_e x n_e block, the value offset of the lower-triangle entry
  /// or -1 when either DOF is skipped.
  static SparseSymMatrix from_elements(int n, const std::vector<std::vector<int>>& element_dofs,
                                       std::vector<std::vector<int>>* scatter);

  /// Wraps an existing lower-triangle matrix (upper entries are dropped).
  static SparseSymMatrix from_lower(const Storage& lower);

  int rows() const { return static_cast<int>(lower_.rows()); }
  long nonzeros() const { return lower_.nonZeros(); }
  const Storage& lower() const { return lower_; }
  double* values() { return lower_.valuePtr(); }
  const double* values() const { return lower_.valuePtr(); }
  void set_zero();

  double coeff(int i, int j) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;

  /// Principal submatrix on the listed (sorted, unique) indices.
  SparseSymMatrix submatrix(const std::vector<int>& keep) const;

 private:
  Storage lower_;
};

}  // namespace pff
