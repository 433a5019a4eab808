#include "pff/newton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pff/errors.hpp"
#include "pff/linear_solver.hpp"

namespace pff {

double MechanicalProblem::energy(const Eigen::VectorXd& w) {
  commit(w);
  return a_.energy(s_);
}

Eigen::VectorXd MechanicalProblem::residual(const Eigen::VectorXd& w) {
  commit(w);
  return a_.residual_u(s_);
}

SparseSymMatrix MechanicalProblem::stiffness(const Eigen::VectorXd& w) {
  commit(w);
  return a_.stiffness_u(s_);
}

double DamageProblem::energy(const Eigen::VectorXd& w) {
  commit(w);
  return a_.energy(s_, penalty_);
}

Eigen::VectorXd DamageProblem::residual(const Eigen::VectorXd& w) {
  commit(w);
  return a_.residual_alpha(s_, penalty_);
}

SparseSymMatrix DamageProblem::stiffness(const Eigen::VectorXd& w) {
  commit(w);
  return a_.stiffness_alpha(s_, penalty_);
}

Eigen::VectorXd project(const Eigen::VectorXd& w, const Bounds& b) {
  return w.cwiseMax(b.lower).cwiseMin(b.upper);
}

std::vector<bool> active_set(const Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b) {
  std::vector<bool> active(w.size(), false);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    active[i] = b.lower[i] == b.upper[i] || (w[i] <= b.lower[i] + b.tol && R[i] > 0.0) ||
                (w[i] >= b.upper[i] - b.tol && R[i] < 0.0);
  }
  return active;
}

Eigen::VectorXd modified_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b) {
  Eigen::VectorXd out = R;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (b.lower[i] == b.upper[i]) {
      out[i] = 0.0;
    } else if (w[i] <= b.lower[i] + b.tol) {
      out[i] = std::min(R[i], 0.0);
    } else if (w[i] >= b.upper[i] - b.tol) {
      out[i] = std::max(R[i], 0.0);
    }
  }
  return out;
}

SubproblemRay::SubproblemRay(Subproblem& problem, const Eigen::VectorXd& w, const Eigen::VectorXd& dw,
                             const Eigen::VectorXd& residual_at_w, const Bounds* bounds)
    : problem_(problem), w_(w), dw_(dw), bounds_(bounds), dw_norm_(dw.norm()), cached_raw_(residual_at_w) {
  cached_effective_ = bounds_ ? modified_residual(point(0.0), cached_raw_, *bounds_) : cached_raw_;
}

Eigen::VectorXd SubproblemRay::point(double lambda) const {
  Eigen::VectorXd p = w_ + lambda * dw_;
  return bounds_ ? project(p, *bounds_) : p;
}

const Eigen::VectorXd* SubproblemRay::cached_residual(double lambda) const {
  return lambda == cached_lambda_ ? &cached_raw_ : nullptr;
}

const Eigen::VectorXd& SubproblemRay::effective_residual(double lambda) {
  if (lambda != cached_lambda_) {
    const Eigen::VectorXd p = point(lambda);
    cached_raw_ = problem_.residual(p);
    ++residual_evals_;
    cached_effective_ = bounds_ ? modified_residual(p, cached_raw_, *bounds_) : cached_raw_;
    cached_lambda_ = lambda;
  }
  return cached_effective_;
}

double SubproblemRay::energy(double lambda) {
  ++energy_evals_;
  return problem_.energy(point(lambda));
}

double SubproblemRay::slope(double lambda) { return effective_residual(lambda).dot(dw_); }

double SubproblemRay::residual_norm_sq(double lambda) { return effective_residual(lambda).squaredNorm(); }

void NewtonSettings::validate() const {
  std::vector<std::string> problems;
  if (!(tol > 0.0)) problems.emplace_back("tol_newton must be positive");
  if (max_iter < 1) problems.emplace_back("max_newton must be >= 1");
  if (!(active_set_tol > 0.0)) problems.emplace_back("active_set_tol must be positive");
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid Newton settings:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

namespace {

void factorize_at(LinearSolver& solver, const SparseSymMatrix& K, int iteration) {
  try {
    solver.factorize(K);
  } catch (const IndefiniteMatrixError& e) {
    throw IndefiniteMatrixError("Newton iteration " + std::to_string(iteration) + ": " + e.what(), e.pivot());
  }
}

// Descent direction for an indefinite K: solves (K + tau |diag K|) d = rhs
// with the smallest tau in 1e-4, 1e-3, ..., 1e6 that admits LDL^T, and
// falls back to d = rhs.
Eigen::VectorXd descent_direction(const SparseSymMatrix& K, const Eigen::VectorXd& rhs, NewtonReport& report) {
  const SparseSymMatrix::Storage& lower = K.lower();
  Eigen::VectorXd diag(K.rows());
  for (int i = 0; i < K.rows(); ++i) diag[i] = std::abs(K.coeff(i, i));
  const double floor = 1e-12 * std::max(1.0, diag.maxCoeff());
  diag = diag.cwiseMax(floor);
  LinearSolver spd(false);
  for (double tau = 1e-4; tau <= 1e6; tau *= 10.0) {
    SparseSymMatrix::Storage shifted = lower;
    for (int i = 0; i < K.rows(); ++i) shifted.coeffRef(i, i) += tau * diag[i];
    try {
      spd.factorize(SparseSymMatrix::from_lower(shifted));
    } catch (const IndefiniteMatrixError&) {
      continue;
    }
    Eigen::VectorXd d = spd.solve(rhs);
    if (rhs.dot(d) > 0.0) {
      ++report.shifted_steps;
      return d;
    }
  }
  ++report.steepest_descent_steps;
  return rhs;
}

// Moves entries that are active within tol of a bound onto the bound.
bool snap_to_active_bounds(Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b) {
  bool moved = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] != b.lower[i] && w[i] <= b.lower[i] + b.tol && R[i] > 0.0) {
      w[i] = b.lower[i];
      moved = true;
    } else if (w[i] != b.upper[i] && w[i] >= b.upper[i] - b.tol && R[i] < 0.0) {
      w[i] = b.upper[i];
      moved = true;
    }
  }
  return moved;
}

// (w - lower)^T R over entries below the upper bound.
double complementarity(const Eigen::VectorXd& w, const Eigen::VectorXd& R, const Bounds& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < b.upper[i] - b.tol) sum += (w[i] - b.lower[i]) * R[i];
  }
  return sum;
}

struct StepOutcome {
  Eigen::VectorXd w;
  Eigen::VectorXd residual;
};

StepOutcome take_step(Subproblem& problem, const Eigen::VectorXd& w, const Eigen::VectorXd& dw,
                      const Eigen::VectorXd& R, const Bounds* bounds, const LineSearchSettings& ls,
                      NewtonReport& report) {
  SubproblemRay ray(problem, w, dw, R, bounds);
  const LineSearchResult r = run_line_search(ray, ls);
  report.linesearch.push_back({r.lambda, r.iterations, r.residual_evaluations, r.energy_evaluations, r.failed, r.steps});
  report.residual_evaluations += r.residual_evaluations;
  report.energy_evaluations += r.energy_evaluations;

  StepOutcome out;
  out.w = ray.point(r.lambda);
  if (const Eigen::VectorXd* cached = ray.cached_residual(r.lambda)) {
    out.residual = *cached;
  } else {
    out.residual = problem.residual(out.w);
    ++report.residual_evaluations;
  }
  return out;
}

}  // namespace

NewtonReport newton_solve(Subproblem& problem, Eigen::VectorXd& w, const NewtonSettings& settings,
                          const LineSearchSettings& ls, const NewtonObserver& observer) {
  NewtonReport report;
  report.initial_energy = problem.energy(w);
  LinearSolver solver(settings.allow_indefinite);
  Eigen::VectorXd R = problem.residual(w);
  ++report.residual_evaluations;
  for (int k = 0;; ++k) {
    const double rn = R.norm();
    report.final_residual = rn;
    if (rn <= settings.tol) {
      report.converged = true;
      break;
    }
    if (k == settings.max_iter) break;
    report.residual_history.push_back(rn);

    const SparseSymMatrix K = problem.stiffness(w);
    factorize_at(solver, K, k);
    Eigen::VectorXd dw = solver.solve(-R);
    if (settings.allow_indefinite && !(R.dot(dw) < 0.0)) dw = descent_direction(K, -R, report);
    if (observer && !observer({k, problem, w, dw, R, nullptr})) {
      report.stopped = true;
      break;
    }
    StepOutcome next = take_step(problem, w, dw, R, nullptr, ls, report);
    w = std::move(next.w);
    R = std::move(next.residual);
    report.energy_history.push_back(problem.energy(w));
    report.iterations = k + 1;
  }
  return report;
}

NewtonReport reduced_space_newton(Subproblem& problem, Eigen::VectorXd& w, const Bounds& bounds,
                                  const NewtonSettings& settings, const LineSearchSettings& ls,
                                  const NewtonObserver& observer) {
  NewtonReport report;
  w = project(w, bounds);
  report.initial_energy = problem.energy(w);
  const SparseSymMatrix K = problem.stiffness(w);
  LinearSolver solver(settings.allow_indefinite);
  Eigen::VectorXd R = problem.residual(w);
  ++report.residual_evaluations;
  for (int k = 0;; ++k) {
    if (snap_to_active_bounds(w, R, bounds)) {
      R = problem.residual(w);
      ++report.residual_evaluations;
    }
    const double rn = modified_residual(w, R, bounds).norm();
    report.final_residual = rn;
    if (rn <= settings.tol && std::abs(complementarity(w, R, bounds)) <= settings.tol) {
      report.converged = true;
      break;
    }
    if (k == settings.max_iter) break;
    report.residual_history.push_back(rn);

    const std::vector<bool> active = active_set(w, R, bounds);
    std::vector<int> inactive;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (!active[i]) inactive.push_back(static_cast<int>(i));
    }
    Eigen::VectorXd rhs(inactive.size());
    for (std::size_t i = 0; i < inactive.size(); ++i) rhs[i] = -R[inactive[i]];
    const SparseSymMatrix Kr = K.submatrix(inactive);
    factorize_at(solver, Kr, k);
    Eigen::VectorXd d_inactive = solver.solve(rhs);
    if (settings.allow_indefinite && !(rhs.dot(d_inactive) > 0.0)) d_inactive = descent_direction(Kr, rhs, report);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(w.size());
    for (std::size_t i = 0; i < inactive.size(); ++i) dw[inactive[i]] = d_inactive[i];

    if (observer && !observer({k, problem, w, dw, R, &bounds})) {
      report.stopped = true;
      break;
    }
    StepOutcome next = take_step(problem, w, dw, R, &bounds, ls, report);
    w = std::move(next.w);
    R = std::move(next.residual);
    report.energy_history.push_back(problem.energy(w));
    report.iterations = k + 1;
  }
  return report;
}

}  // namespace pff
