#pragma once

#include <Eigen/Core>
#include <memory>

#include "pff/sparse.hpp"

namespace pff {

/// Sparse direct solver for the Newton systems. The default mode is a
/// symmetric LDL^T factorization (AMD ordering) that rejects non-positive
/// pivots; with allow_indefinite a general sparse LU is used instead.
class LinearSolver {
 public:
  explicit LinearSolver(bool allow_indefinite = false);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Factorizes K. The symbolic analysis is reused while the pattern
  /// stays identical.
  /// Throws IndefiniteMatrixError carrying the original row index of the
  /// first non-positive pivot (SPD mode) or of a singular pivot (LU mode).
  void factorize(const SparseSymMatrix& K);

  /// Solves with the last factorization plus one step of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  bool allow_indefinite() const { return allow_indefinite_; }

 private:
  struct Impl;
  bool allow_indefinite_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot SPD solve: ||K x - b|| <= 1e-12 (1 + ||b||) on well-conditioned input.
Eigen::VectorXd solve_spd(const SparseSymMatrix& K, const Eigen::VectorXd& b);

}  // namespace pff
