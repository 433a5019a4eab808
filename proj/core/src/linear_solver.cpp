#include "pff/linear_solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <string>
#include <vector>

#include "pff/errors.hpp"

namespace pff {

using Storage = SparseSymMatrix::Storage;

struct LinearSolver::Impl {
  Eigen::SimplicialLDLT<Storage, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  Eigen::SparseLU<Storage, Eigen::COLAMDOrdering<int>> lu;
  Storage full;      // LU mode only
  Storage lower;     // kept for refinement
  std::vector<int> outer, inner;  // pattern of the last symbolic analysis
  bool analyzed = false;
  bool factored = false;

  bool same_pattern(const Storage& m) const {
    if (!analyzed || static_cast<long>(outer.size()) != m.outerSize() + 1) return false;
    if (!std::equal(outer.begin(), outer.end(), m.outerIndexPtr())) return false;
    return static_cast<long>(inner.size()) == m.nonZeros() && std::equal(inner.begin(), inner.end(), m.innerIndexPtr());
  }
  void remember(const Storage& m) {
    outer.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.outerSize() + 1);
    inner.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
    analyzed = true;
  }
};

LinearSolver::LinearSolver(bool allow_indefinite)
    : allow_indefinite_(allow_indefinite), impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const SparseSymMatrix& K) {
  Impl& s = *impl_;
  s.factored = false;
  s.lower = K.lower();
  const bool same_pattern = s.same_pattern(s.lower);

  if (allow_indefinite_) {
    s.full = K.lower().selfadjointView<Eigen::Lower>();
    s.full.makeCompressed();
    if (!same_pattern) {
      s.lu.analyzePattern(s.full);
      s.remember(s.lower);
    }
    s.lu.factorize(s.full);
    if (s.lu.info() != Eigen::Success) {
      throw IndefiniteMatrixError("sparse LU factorization failed: " + s.lu.lastErrorMessage(), -1);
    }
    s.factored = true;
    return;
  }

  if (!same_pattern) {
    s.ldlt.analyzePattern(s.lower);
    s.remember(s.lower);
  }
  s.ldlt.factorize(s.lower);
  const Eigen::VectorXd& d = s.ldlt.vectorD();
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (!(d[k] > 0.0)) {
      const int original = s.ldlt.permutationPinv().indices()[k];
      throw IndefiniteMatrixError("non-positive pivot " + std::to_string(d[k]) + " at row " + std::to_string(original),
                                  original);
    }
  }
  if (s.ldlt.info() != Eigen::Success) throw IndefiniteMatrixError("LDL^T factorization failed", -1);
  s.factored = true;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const {
  const Impl& s = *impl_;
  if (!s.factored) throw Error("LinearSolver::solve called without a successful factorization");
  auto apply = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    if (allow_indefinite_) return s.lu.solve(rhs);
    return s.ldlt.solve(rhs);
  };
  Eigen::VectorXd x = apply(b);
  const Eigen::VectorXd r = b - s.lower.selfadjointView<Eigen::Lower>() * x;
  x += apply(r);
  return x;
}

Eigen::VectorXd solve_spd(const SparseSymMatrix& K, const Eigen::VectorXd& b) {
  if (b.size() != K.rows()) throw Error("solve_spd: right-hand side length does not match the matrix");
  LinearSolver solver;
  solver.factorize(K);
  return solver.solve(b);
}

}  // namespace pff
