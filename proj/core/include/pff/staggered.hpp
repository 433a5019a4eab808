#pragma once

// Alternate minimization of one load step: mechanical Newton solve at fixed
// damage, then damage solve at fixed displacement, until the displacement
// residual re-evaluated at the new damage drops below tol.

#include <string>
#include <string_view>
#include <vector>

#include "pff/assembly.hpp"
#include "pff/line_search.hpp"
#include "pff/newton.hpp"

namespace pff {

enum class Irreversibility { ReducedSpace, Penalty };

std::string_view to_string(Irreversibility i);
Irreversibility parse_irreversibility(std::string_view text);

/// Closed vocabulary of step failure causes.
namespace failure {
inline constexpr std::string_view kMechanical = "mechanical_nonconvergence";
inline constexpr std::string_view kDamage = "damage_nonconvergence";
inline constexpr std::string_view kStaggeredCap = "staggered_cap";
inline constexpr std::string_view kIndefinite = "indefinite_matrix";
inline constexpr std::string_view kNotDescent = "not_descent";
inline constexpr std::string_view kAssembly = "assembly_error";
}  // namespace failure

struct StaggeredSettings {
  double tol = 1e-6;
  int max_iter = 5000;
  Irreversibility irreversibility = Irreversibility::ReducedSpace;
  PenaltySettings penalty;
  NewtonSettings newton;
  LineSearchSettings ls_mechanical = LineSearchSettings::defaults(LineSearchKind::Bisection);
  LineSearchSettings ls_damage = LineSearchSettings::defaults(LineSearchKind::FullStep);

  void validate() const;
  friend bool operator==(const StaggeredSettings&, const StaggeredSettings&) = default;
};

struct StaggeredIterate {
  int iteration = 0;
  int cum_newton_u = 0;
  int cum_newton_alpha = 0;
  double res_u_norm = 0.0;   ///< ||R_u(u^i, alpha^i)||
  double dalpha_norm = 0.0;  ///< L2 norm of alpha^i - alpha^{i-1}
  double energy = 0.0;       ///< E(u^i, alpha^i)
  double denergy = 0.0;      ///< E(u^{i-1}, alpha^{i-1}) - E(u^i, alpha^i)
  double energy_mid = 0.0;   ///< E(u^i, alpha^{i-1})

  friend bool operator==(const StaggeredIterate&, const StaggeredIterate&) = default;
};

using StaggeredPath = std::vector<StaggeredIterate>;

struct StaggeredResult {
  bool converged = false;
  std::string failure_cause;  ///< empty on success
  std::string message;
  double initial_energy = 0.0;
  StaggeredPath path;
  std::vector<NewtonReport> mechanical;
  std::vector<NewtonReport> damage;
  int newton_u_total() const { return path.empty() ? 0 : path.back().cum_newton_u; }
  int newton_alpha_total() const { return path.empty() ? 0 : path.back().cum_newton_alpha; }
};

/// True when the damage block may be indefinite (star-convex with gamma* > 0).
bool damage_may_be_indefinite(const MaterialModel& m);

/// Runs the alternate minimization from `state` (alpha_prev and the Dirichlet values of the new
/// step already set). Non-convergence and solver errors are reported in the
/// result; `state` holds the last iterate either way.
StaggeredResult alternate_minimization(const Assembler& assembler, State& state, const StaggeredSettings& settings,
                                       const NewtonObserver& mechanical_observer = {});

}  // namespace pff
