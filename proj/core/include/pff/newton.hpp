#pragma once

// Newton's method for the two subproblems of the staggered scheme, with the
// reduced-space active-set variant for the bound-constrained damage problem.

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pff/assembly.hpp"
#include "pff/line_search.hpp"
#include "pff/sparse.hpp"

namespace pff {

/// Energy, gradient and Hessian of one subproblem in its free unknowns.
class Subproblem {
 public:
  virtual ~Subproblem() = default;
  virtual int size() const = 0;
  virtual double energy(const Eigen::VectorXd& w) = 0;
  virtual Eigen::VectorXd residual(const Eigen::VectorXd& w) = 0;
  virtual SparseSymMatrix stiffness(const Eigen::VectorXd& w) = 0;
};

/// Displacement problem at fixed damage; w are the free displacement DOFs.
class MechanicalProblem : public Subproblem {
 public:
  MechanicalProblem(const Assembler& assembler, State& state) : a_(assembler), s_(state) {}
  int size() const override { return a_.constraints().u.num_free(); }
  double energy(const Eigen::VectorXd& w) override;
  Eigen::VectorXd residual(const Eigen::VectorXd& w) override;
  SparseSymMatrix stiffness(const Eigen::VectorXd& w) override;
  Eigen::VectorXd current() const { return a_.constraints().u.restrict(s_.u); }
  void commit(const Eigen::VectorXd& w) { a_.constraints().u.scatter(w, s_.u); }

 private:
  const Assembler& a_;
  State& s_;
};

/// Damage problem at fixed displacement, optionally penalized.
class DamageProblem : public Subproblem {
 public:
  DamageProblem(const Assembler& assembler, State& state, const PenaltySettings* penalty = nullptr)
      : a_(assembler), s_(state), penalty_(penalty) {}
  int size() const override { return a_.constraints().alpha.num_free(); }
  double energy(const Eigen::VectorXd& w) override;
  Eigen::VectorXd residual(const Eigen::VectorXd& w) override;
  SparseSymMatrix stiffness(const Eigen::VectorXd& w) override;
  Eigen::VectorXd current() const { return a_.constraints().alpha.restrict(s_.alpha); }
  void commit(const Eigen::VectorXd& w) { a_.constraints().alpha.scatter(w, s_.alpha); }

 private:
  const Assembler& a_;
  State& s_;
  const PenaltySettings* penalty_;
};

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double tol = 1e-8;  ///< active-set classification tolerance
};

/// Componentwise projection onto [lower, upper].
Eigen::VectorXd project(const Eigen::VectorXd& w, const Bounds& b);

/// Active DOFs: lower == upper, or w <= lower + tol with R > 0, or
/// w >= upper - tol with R < 0.
std::vector<bool> active_set(const Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b);

/// Residual with the infeasible-direction components removed at the bounds:
/// min(R, 0) at the lower bound, max(R, 0) at the upper bound, 0 where the
/// bounds coincide.
Eigen::VectorXd modified_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b);

/// phi(lambda) = E(p(lambda)) with p = w + lambda dw, or its projection onto
/// the bounds. Residuals are cached for the last lambda evaluated.
class SubproblemRay : public RayFunction {
 public:
  SubproblemRay(Subproblem& problem, const Eigen::VectorXd& w, const Eigen::VectorXd& dw,
                const Eigen::VectorXd& residual_at_w, const Bounds* bounds = nullptr);

  double energy(double lambda) override;
  double slope(double lambda) override;
  double residual_norm_sq(double lambda) override;
  double direction_norm() const override { return dw_norm_; }

  Eigen::VectorXd point(double lambda) const;
  /// Raw residual at `lambda` if it was the last one assembled.
  const Eigen::VectorXd* cached_residual(double lambda) const;

 private:
  const Eigen::VectorXd& effective_residual(double lambda);

  Subproblem& problem_;
  const Eigen::VectorXd& w_;
  const Eigen::VectorXd& dw_;
  const Bounds* bounds_;
  double dw_norm_;
  double cached_lambda_ = 0.0;
  Eigen::VectorXd cached_raw_;
  Eigen::VectorXd cached_effective_;
};

struct NewtonSettings {
  double tol = 1e-8;
  int max_iter = 5000;
  double active_set_tol = 1e-8;
  bool allow_indefinite = false;  ///< LU instead of LDL^T, shifted-Hessian fallback

  void validate() const;
  friend bool operator==(const NewtonSettings&, const NewtonSettings&) = default;
};

struct LineSearchRecord {
  double lambda = 1.0;
  int iterations = 0;
  int residual_evaluations = 0;
  int energy_evaluations = 0;
  bool failed = false;
  std::vector<LineSearchStep> steps;
};

struct NewtonReport {
  bool converged = false;
  bool stopped = false;  ///< an observer asked to stop
  int iterations = 0;
  double initial_energy = 0.0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  ///< ||R|| before each step
  std::vector<double> energy_history;    ///< energy after each step
  std::vector<LineSearchRecord> linesearch;
  int residual_evaluations = 0;  ///< Newton residuals plus line-search residuals
  int energy_evaluations = 0;    ///< line-search energies only
  int shifted_steps = 0;           ///< LU direction rejected, solved with K + tau |diag K|
  int steepest_descent_steps = 0;  ///< no shift up to the cap was positive definite
};

/// Called after the Newton direction of each iteration is known and before
/// the line search; returning false stops the solve.
struct NewtonIterationView {
  int iteration;
  Subproblem& problem;
  const Eigen::VectorXd& w;
  const Eigen::VectorXd& dw;
  const Eigen::VectorXd& residual;
  const Bounds* bounds;
};
using NewtonObserver = std::function<bool(const NewtonIterationView&)>;

/// Unconstrained Newton; w is updated in place.
NewtonReport newton_solve(Subproblem& problem, Eigen::VectorXd& w, const NewtonSettings& settings,
                          const LineSearchSettings& ls, const NewtonObserver& observer = {});

/// Reduced-space active-set Newton on [bounds.lower, bounds.upper]. The
/// stiffness is assembled once at the initial iterate and reused. Active
/// entries within bounds.tol of their bound are snapped onto it. Converged
/// when both the modified residual norm and |(w - lower)^T R| over entries
/// below the upper bound are <= tol.
NewtonReport reduced_space_newton(Subproblem& problem, Eigen::VectorXd& w, const Bounds& bounds,
                                  const NewtonSettings& settings, const LineSearchSettings& ls,
                                  const NewtonObserver& observer = {});

}  // namespace pff
