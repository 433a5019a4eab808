// pff: command-line front end.
//
//   pff run <config>
//   pff sample-linesearch <config> --step N --newton-iter K --samples M
//   pff compare-linesearches <config> --step N
//   pff verify
//
// Exit status: 0 success, 1 solver non-convergence (outputs still written),
// 2 configuration, IO or checkpoint errors.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "pff/config.hpp"
#include "pff/driver.hpp"
#include "pff/errors.hpp"
#include "pff/io.hpp"
#include "pff/verify.hpp"

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const pff::RunConfig& cfg, const std::string& override_dir) {
  fs::path dir = override_dir.empty() ? fs::path(cfg.output.directory) : fs::path(override_dir);
  fs::create_directories(dir);
  return dir;
}

std::string step_name(const char* prefix, int step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04d%s", prefix, step, ext);
  return buf;
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool verbose) {
  const pff::RunConfig cfg = pff::load_config(config_path);
  const fs::path dir = output_dir(cfg, out_override);
  pff::RunLog log(dir / "run.log", verbose);
  log.line("config " + config_path);
  const pff::BenchmarkCase c = pff::build_case(cfg);

  pff::RunOptions opts;
  opts.log = &log;
  int current_step = 1;
  std::map<int, std::vector<pff::ProfileRow>> profiles;
  if (cfg.output.profiles) {
    opts.mechanical_observer = [&](const pff::NewtonIterationView& v) {
      if (v.iteration == 0 && !profiles.count(current_step)) {
        pff::SubproblemRay ray(v.problem, v.w, v.dw, v.residual, v.bounds);
        profiles[current_step] = pff::sample_linesearch_profile(ray, 101);
      }
      return true;
    };
  }
  opts.on_step = [&](const pff::StepRecord& r, const pff::State& s) {
    if (cfg.output.csv && !r.path.empty()) pff::write_path_csv(r.path, dir / step_name("path_step", r.step, ".csv"));
    if (cfg.output.vtk) pff::write_vtk(c.mesh, s, dir / step_name("state_step", r.step, ".vtk"));
    if (auto it = profiles.find(r.step); it != profiles.end()) {
      pff::write_profile_csv(it->second, dir / step_name("profile_step", r.step, ".csv"));
    }
    ++current_step;
  };

  const pff::RunResult run = pff::run_case(c, cfg.solver, opts);
  if (cfg.output.csv && !run.steps.empty()) pff::write_step_csv(run.steps, dir / "steps.csv");
  const bool ok = run.converged();
  log.line(ok ? "finished: all steps converged" : "finished: non-convergence");
  std::cout << (ok ? "converged" : "not converged") << ": " << run.steps.size() << " step(s), output in "
            << dir.string() << "\n";
  return ok ? 0 : 1;
}

int cmd_sample(const std::string& config_path, int step, int newton_iter, int samples, const std::string& out_file,
               const std::string& out_override) {
  const pff::RunConfig cfg = pff::load_config(config_path);
  const fs::path dir = output_dir(cfg, out_override);
  const auto rows = pff::sample_mechanical_profile(cfg, step, newton_iter, samples, dir / "checkpoints");
  const fs::path file = out_file.empty()
                            ? dir / ("profile_step" + std::to_string(step) + "_iter" + std::to_string(newton_iter) + ".csv")
                            : fs::path(out_file);
  pff::write_profile_csv(rows, file);
  std::cout << "wrote " << rows.size() << " samples to " << file.string() << "\n";
  return 0;
}

int cmd_compare(const std::string& config_path, int step, const std::vector<std::string>& variant_names,
                const std::string& out_file, const std::string& out_override) {
  const pff::RunConfig cfg = pff::load_config(config_path);
  std::vector<pff::LineSearchKind> variants;
  for (const auto& v : variant_names) variants.push_back(pff::parse_line_search(v));
  if (variants.empty()) variants = pff::all_line_searches();
  const fs::path dir = output_dir(cfg, out_override);
  const auto rows = pff::compare_linesearches(cfg, step, variants, dir / "checkpoints");
  const fs::path file =
      out_file.empty() ? dir / ("comparison_step" + std::to_string(step) + ".csv") : fs::path(out_file);
  pff::write_comparison_csv(rows, file);
  std::printf("%-22s %9s %9s %11s %10s %10s %10s  %s\n", "variant", "converged", "newton_u", "newton_alpha",
              "staggered", "res/iter", "energy/iter", "failure");
  for (const auto& r : rows) {
    std::printf("%-22s %9s %9d %11d %10d %10.3f %10.3f  %s\n", std::string(pff::to_string(r.variant)).c_str(),
                r.converged ? "yes" : "no", r.newton_u_total, r.newton_alpha_total, r.staggered_iters,
                r.residual_evals_per_iter, r.energy_evals_per_iter, r.failure_cause.c_str());
  }
  std::cout << "wrote " << file.string() << "\n";
  return 0;
}

int cmd_verify() {
  const auto checks = pff::run_self_checks();
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%-4s %-48s max_error=%.3e tol=%.1e\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.max_error,
                c.tolerance);
    ok = ok && c.passed;
  }
  std::printf("%zu checks, %s\n", checks.size(), ok ? "all passed" : "FAILURES");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field brittle fracture solver"};
  app.require_subcommand(1);

  std::string config, out_dir, out_file;
  int step = 0, newton_iter = 0, samples = 101;
  bool verbose = false;
  std::vector<std::string> variants;

  auto* run = app.add_subcommand("run", "Run the load program of a configuration");
  run->add_option("config", config, "Configuration file")->required();
  run->add_option("--output-dir", out_dir, "Override the configured output directory");
  run->add_flag("-v,--verbose", verbose, "Echo the run log to stderr");

  auto* sample = app.add_subcommand("sample-linesearch", "Sample the mechanical energy along a Newton direction");
  sample->add_option("config", config, "Configuration file")->required();
  sample->add_option("--step", step, "Load step (1-based)")->required();
  sample->add_option("--newton-iter", newton_iter, "Mechanical Newton iteration within the step (0-based)")->required();
  sample->add_option("--samples", samples, "Number of lambda samples on [0, 1]")->check(CLI::Range(2, 1000000));
  sample->add_option("-o,--output", out_file, "Profile CSV path");
  sample->add_option("--output-dir", out_dir, "Override the configured output directory");

  auto* compare = app.add_subcommand("compare-linesearches", "Rerun one load step with every line-search variant");
  compare->add_option("config", config, "Configuration file")->required();
  compare->add_option("--step", step, "Load step (1-based)")->required();
  compare->add_option("--variants", variants, "Subset of variants (default: all)");
  compare->add_option("-o,--output", out_file, "Comparison CSV path");
  compare->add_option("--output-dir", out_dir, "Override the configured output directory");

  app.add_subcommand("verify", "Run the built-in derivative and consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config, out_dir, verbose);
    if (*sample) return cmd_sample(config, step, newton_iter, samples, out_file, out_dir);
    if (*compare) return cmd_compare(config, step, variants, out_file, out_dir);
    return cmd_verify();
  } catch (const pff::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
  } catch (const pff::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
  } catch (const pff::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
