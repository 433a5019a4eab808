#pragma once

// Tabular results produced by the driver and serialized by io.

#include <string>
#include <vector>

#include "pff/line_search.hpp"
#include "pff/staggered.hpp"

namespace pff {

struct StepRecord {
  int step = 0;
  double applied_displacement = 0.0;
  double reaction_force = 0.0;
  double max_alpha = 0.0;
  int staggered_iters = 0;
  int newton_u_total = 0;
  int newton_alpha_total = 0;
  bool converged = false;
  std::string failure_cause;

  // Not part of the step CSV.
  double load_factor = 0.0;
  double max_psi_D = 0.0;           ///< over quadrature points at the end of the step
  double max_alpha_increase = 0.0;  ///< max(alpha - alpha_prev)
  double min_alpha_increase = 0.0;  ///< min(alpha - alpha_prev)
  double complementarity = 0.0;     ///< (alpha - alpha_prev) . R_alpha over free DOFs below alpha = 1
  double residual_alpha_norm = 0.0;
  std::string message;
  StaggeredPath path;
};

struct ProfileRow {
  double lambda = 0.0;
  double energy = 0.0;
  double slope = 0.0;
  double res_norm = 0.0;
  std::string error;  ///< non-empty if the assembly failed at this lambda

  friend bool operator==(const ProfileRow&, const ProfileRow&) = default;
};

struct ComparisonRow {
  LineSearchKind variant = LineSearchKind::Bisection;
  bool converged = false;
  int newton_u_total = 0;
  int newton_alpha_total = 0;
  int staggered_iters = 0;
  double residual_evals_per_iter = 0.0;  ///< mechanical residual assemblies per mechanical Newton iteration
  double energy_evals_per_iter = 0.0;
  std::string failure_cause;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

}  // namespace pff
