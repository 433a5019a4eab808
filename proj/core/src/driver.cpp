#include "pff/driver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pff/errors.hpp"

namespace pff {

BenchmarkCase build_case(const RunConfig& config) {
  BenchmarkCase c;
  switch (config.kind) {
    case CaseKind::Nucleation:
      c = make_nucleation_case(config.material, config.nx, config.ny, config.load, config.length, config.angle_deg);
      break;
    case CaseKind::Sliding:
      c = make_sliding_case(config.material, config.nx, config.ny, config.load, config.length);
      break;
    case CaseKind::Imported: {
      c.kind = CaseKind::Imported;
      c.mesh = read_mesh(config.mesh_file);
      c.material = config.material;
      c.load = config.load;
      c.conditions = config.dirichlet;
      std::set<int> cracked;
      for (const auto& name : config.crack_sets) {
        for (int n : c.mesh.node_set(name)) cracked.insert(n);
      }
      c.crack_nodes.assign(cracked.begin(), cracked.end());
      c.reference_displacement = config.reference_displacement;
      break;
    }
  }
  c.reaction_set = config.reaction_set;
  c.reaction_component = config.reaction_component;
  c.mesh.node_set(c.reaction_set);
  for (const auto& lc : c.conditions) c.mesh.node_set(lc.bc.node_set);
  return c;
}

bool RunResult::converged() const {
  return !steps.empty() && std::all_of(steps.begin(), steps.end(), [](const StepRecord& r) { return r.converged; });
}

RunResult run_case(const BenchmarkCase& c, const StaggeredSettings& settings, const RunOptions& options) {
  c.load.validate();
  settings.validate();
  RunResult result;
  State state = options.start ? *options.start : c.initial_state();
  State scratch = c.initial_state();
  Constraints constraints = apply_dirichlet(c.mesh, scratch, c.dirichlet_at(0.0));
  const Assembler assembler(c.mesh, c.material, constraints);
  const DofMap& amap = assembler.constraints().alpha;

  const int last = options.last_step > 0 ? std::min(options.last_step, c.load.steps) : c.load.steps;
  for (int n = options.first_step; n <= last; ++n) {
    const double t = c.load.load_factor(n);
    state.alpha_prev = state.alpha;
    set_dirichlet_values(c.mesh, state, c.dirichlet_at(t));

    StaggeredResult sr = alternate_minimization(assembler, state, settings, options.mechanical_observer);

    StepRecord r;
    r.step = n;
    r.load_factor = t;
    r.applied_displacement = t * c.reference_displacement;
    r.converged = sr.converged;
    r.failure_cause = sr.failure_cause;
    r.message = sr.message;
    r.staggered_iters = static_cast<int>(sr.path.size());
    r.newton_u_total = 0;
    r.newton_alpha_total = 0;
    for (const auto& m : sr.mechanical) r.newton_u_total += m.iterations;
    for (const auto& d : sr.damage) r.newton_alpha_total += d.iterations;
    r.path = sr.path;
    try {
      r.reaction_force = assembler.reaction(state, c.reaction_set, c.reaction_component);
      r.max_psi_D = assembler.max_psi_D(state);
      const Eigen::VectorXd increase = state.alpha - state.alpha_prev;
      r.max_alpha = state.alpha.maxCoeff();
      r.max_alpha_increase = increase.maxCoeff();
      r.min_alpha_increase = increase.minCoeff();
      const Eigen::VectorXd Ra = assembler.residual_alpha(state);
      const Eigen::VectorXd a_free = amap.restrict(state.alpha);
      const Eigen::VectorXd inc_free = amap.restrict(increase);
      r.complementarity = 0.0;
      for (Eigen::Index i = 0; i < Ra.size(); ++i) {
        if (a_free[i] < 1.0 - settings.newton.active_set_tol) r.complementarity += inc_free[i] * Ra[i];
      }
      Bounds b;
      b.lower = amap.restrict(state.alpha_prev);
      b.upper = Eigen::VectorXd::Ones(amap.num_free());
      b.tol = settings.newton.active_set_tol;
      r.residual_alpha_norm = modified_residual(a_free, Ra, b).norm();
    } catch (const AssemblyError& e) {
      r.converged = false;
      if (r.failure_cause.empty()) r.failure_cause = std::string(failure::kAssembly);
      r.message += std::string(r.message.empty() ? "" : "; ") + e.what();
    }

    if (options.log) {
      std::ostringstream os;
      os.precision(6);
      os << "step " << n << " t=" << t << " reaction=" << r.reaction_force << " max_alpha=" << r.max_alpha
         << " staggered=" << r.staggered_iters << " newton_u=" << r.newton_u_total
         << " newton_alpha=" << r.newton_alpha_total << (r.converged ? " converged" : " FAILED " + r.failure_cause);
      if (!r.message.empty() && !r.converged) os << " (" << r.message << ")";
      options.log->line(os.str());
    }
    if (options.on_step) options.on_step(r, state);
    const bool ok = r.converged;
    const double max_alpha = r.max_alpha;
    result.steps.push_back(std::move(r));
    if (options.keep_reports) result.reports.push_back(std::move(sr));
    if (!ok) break;
    if (c.load.stop_alpha > 0.0 && max_alpha >= c.load.stop_alpha) break;
  }
  result.state = std::move(state);
  return result;
}

std::uint64_t checkpoint_hash(const RunConfig& config) {
  RunConfig ref = config;
  ref.output = OutputSettings{};
  ref.solver.ls_mechanical = LineSearchSettings::defaults(LineSearchKind::Bisection);
  return fnv1a(serialize_config(ref));
}

State reach_step(const RunConfig& config, int step, const std::filesystem::path& checkpoint_dir) {
  if (step < 1 || step > config.load.steps) {
    throw CheckpointError("step " + std::to_string(step) + " is outside the load program (1.." +
                          std::to_string(config.load.steps) + ")");
  }
  const BenchmarkCase c = build_case(config);
  if (step == 1) return c.initial_state();

  const std::uint64_t hash = checkpoint_hash(config);
  std::filesystem::path file;
  if (!checkpoint_dir.empty()) {
    file = checkpoint_dir / ("checkpoint_step" + std::to_string(step - 1) + ".bin");
    if (std::filesystem::exists(file)) {
      Checkpoint cp = read_checkpoint(file);
      if (cp.config_hash == hash && cp.step == step - 1) return cp.state;
    }
  }

  StaggeredSettings ref = config.solver;
  ref.ls_mechanical = LineSearchSettings::defaults(LineSearchKind::Bisection);
  RunOptions opts;
  opts.last_step = step - 1;
  const RunResult run = run_case(c, ref, opts);
  if (static_cast<int>(run.steps.size()) != step - 1 || !run.converged()) {
    std::ostringstream os;
    os << "checkpoint for step " << step << " is missing: the reference run stopped at step "
       << (run.steps.empty() ? 0 : run.steps.back().step);
    if (!run.steps.empty() && !run.steps.back().converged) os << " (" << run.steps.back().failure_cause << ")";
    throw CheckpointError(os.str());
  }
  if (!file.empty()) write_checkpoint({hash, step - 1, run.state}, file);
  return run.state;
}

std::vector<ProfileRow> sample_linesearch_profile(RayFunction& ray, int n_samples) {
  if (n_samples < 2) throw ConfigError("profile sampling needs at least 2 samples");
  std::vector<ProfileRow> rows;
  rows.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    ProfileRow row;
    row.lambda = i == n_samples - 1 ? 1.0 : static_cast<double>(i) / (n_samples - 1);
    try {
      row.energy = ray.energy(row.lambda);
      row.slope = ray.slope(row.lambda);
      row.res_norm = std::sqrt(ray.residual_norm_sq(row.lambda));
    } catch (const Error& e) {
      row.energy = row.slope = row.res_norm = std::nan("");
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ProfileRow> sample_mechanical_profile(const RunConfig& config, int step, int newton_iter, int n_samples,
                                                  const std::filesystem::path& checkpoint_dir) {
  if (n_samples < 2) throw ConfigError("profile sampling needs at least 2 samples");
  if (newton_iter < 0) throw ConfigError("newton iteration index must be >= 0");
  State start = reach_step(config, step, checkpoint_dir);
  const BenchmarkCase c = build_case(config);
  std::vector<ProfileRow> rows;
  int seen = 0;
  RunOptions opts;
  opts.first_step = step;
  opts.last_step = step;
  opts.start = std::move(start);
  opts.mechanical_observer = [&](const NewtonIterationView& v) {
    if (seen++ < newton_iter) return true;
    SubproblemRay ray(v.problem, v.w, v.dw, v.residual, v.bounds);
    rows = sample_linesearch_profile(ray, n_samples);
    return false;
  };
  run_case(c, config.solver, opts);
  if (rows.empty()) {
    throw CheckpointError("mechanical Newton iteration " + std::to_string(newton_iter) + " is never reached in step " +
                          std::to_string(step));
  }
  return rows;
}

std::vector<LineSearchKind> all_line_searches() {
  return {LineSearchKind::Bisection,          LineSearchKind::FullStep, LineSearchKind::BacktrackingResidual,
          LineSearchKind::BacktrackingEnergy, LineSearchKind::SecantL2, LineSearchKind::SecantEnergy,
          LineSearchKind::CriticalPoint};
}

std::vector<ComparisonRow> compare_linesearches(const RunConfig& config, int step,
                                                const std::vector<LineSearchKind>& variants,
                                                const std::filesystem::path& checkpoint_dir) {
  const State start = reach_step(config, step, checkpoint_dir);
  const BenchmarkCase c = build_case(config);
  std::vector<ComparisonRow> rows;
  for (LineSearchKind kind : variants) {
    StaggeredSettings s = config.solver;
    const LineSearchSettings& base = config.solver.ls_mechanical;
    s.ls_mechanical = LineSearchSettings::defaults(kind);
    s.ls_mechanical.atol = base.atol;
    s.ls_mechanical.rtol = base.rtol;
    s.ls_mechanical.ltol = base.ltol;
    s.ls_damage = LineSearchSettings::defaults(LineSearchKind::FullStep);
    s.irreversibility = Irreversibility::ReducedSpace;

    RunOptions opts;
    opts.first_step = step;
    opts.last_step = step;
    opts.start = start;
    opts.keep_reports = true;
    const RunResult run = run_case(c, s, opts);

    ComparisonRow row;
    row.variant = kind;
    const StepRecord& r = run.steps.front();
    row.converged = r.converged;
    row.newton_u_total = r.newton_u_total;
    row.newton_alpha_total = r.newton_alpha_total;
    row.staggered_iters = r.staggered_iters;
    row.failure_cause = r.failure_cause;
    long residuals = 0, energies = 0, iterations = 0;
    for (const auto& m : run.reports.front().mechanical) {
      residuals += m.residual_evaluations;
      energies += m.energy_evaluations;
      iterations += m.iterations;
    }
    if (iterations > 0) {
      row.residual_evals_per_iter = static_cast<double>(residuals) / iterations;
      row.energy_evals_per_iter = static_cast<double>(energies) / iterations;
    }
    rows.push_back(row);
  }
  return rows;
}

AnalyticHelpers analytic_helpers(const MaterialModel& m) {
  if (m.dissipation != Dissipation::AT1) throw ConfigError("analytic strengths need the AT1 model (AT2 has no elastic phase)");
  const double cw = 8.0 / 3.0;
  AnalyticHelpers h;
  h.sigma_e_plus = std::sqrt(m.E0 * m.Gc / (cw * m.ell));
  h.tau_c = std::sqrt(m.mu() * m.Gc / (cw * m.ell));
  h.at1_onset_psi = 3.0 * m.Gc / (16.0 * m.ell);
  return h;
}

}  // namespace pff
