#pragma once

// Load stepping, line-search sampling and comparison, analytic strengths.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "pff/cases.hpp"
#include "pff/config.hpp"
#include "pff/io.hpp"
#include "pff/records.hpp"
#include "pff/staggered.hpp"

namespace pff {

BenchmarkCase build_case(const RunConfig& config);

struct RunOptions {
  int first_step = 1;
  int last_step = 0;                   ///< 0 runs the whole load program
  std::optional<State> start;          ///< state converged at first_step - 1
  NewtonObserver mechanical_observer;  ///< forwarded to every mechanical solve
  std::function<void(const StepRecord&, const State&)> on_step;
  bool keep_reports = false;  ///< keep the Newton reports of every step
  RunLog* log = nullptr;
};

struct RunResult {
  std::vector<StepRecord> steps;
  State state;  ///< last iterate (converged unless the last step failed)
  std::vector<StaggeredResult> reports;  ///< only with keep_reports
  bool converged() const;
};

/// Runs the load program, stopping at the stop criterion or the first failed step.
RunResult run_case(const BenchmarkCase& c, const StaggeredSettings& settings, const RunOptions& options = {});

/// Hash identifying the reference run of a checkpoint: the serialized config
/// with the output section dropped and bisection on the mechanical problem.
std::uint64_t checkpoint_hash(const RunConfig& config);

/// State converged at step - 1 under the reference configuration. Uses
/// `checkpoint_dir`/checkpoint_step<N-1>.bin when present with a matching
/// hash and writes it otherwise (if a directory is given). Throws
/// CheckpointError when the step is out of range or the reference run fails
/// before reaching it.
State reach_step(const RunConfig& config, int step, const std::filesystem::path& checkpoint_dir = {});

/// Uniform lambda grid on [0, 1] inclusive; failures are recorded per row.
std::vector<ProfileRow> sample_linesearch_profile(RayFunction& ray, int n_samples);

/// Reruns `step` with the configured solver and samples the mechanical ray at
/// the `newton_iter`-th (0-based, counted across the step) mechanical Newton
/// iteration. Throws CheckpointError if that iteration is never reached.
std::vector<ProfileRow> sample_mechanical_profile(const RunConfig& config, int step, int newton_iter, int n_samples,
                                                  const std::filesystem::path& checkpoint_dir = {});

/// All variants restart from the same checkpointed state; the damage problem
/// uses the reduced-space method with full steps.
std::vector<ComparisonRow> compare_linesearches(const RunConfig& config, int step,
                                                const std::vector<LineSearchKind>& variants,
                                                const std::filesystem::path& checkpoint_dir = {});

/// Every line-search variant in a fixed order.
std::vector<LineSearchKind> all_line_searches();

struct AnalyticHelpers {
  double sigma_e_plus = 0.0;   ///< sqrt(E0 Gc / (8/3 ell))
  double tau_c = 0.0;          ///< sqrt(mu0 Gc / (8/3 ell))
  double at1_onset_psi = 0.0;  ///< 3 Gc / (16 ell)
};

/// Throws ConfigError for AT2.
AnalyticHelpers analytic_helpers(const MaterialModel& m);

}  // namespace pff
