#pragma once

// CSV tables (17 significant digits, header row, newline-terminated), legacy
// VTK output, binary state checkpoints and the run log.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pff/assembly.hpp"
#include "pff/mesh.hpp"
#include "pff/records.hpp"

namespace pff {

inline constexpr const char* kStepCsvHeader =
    "step,applied_displacement,reaction_force,max_alpha,staggered_iters,newton_u_total,newton_alpha_total,converged,"
    "failure_cause";
inline constexpr const char* kPathCsvHeader =
    "staggered_iter,cum_newton_u,cum_newton_alpha,res_u_norm,dalpha_norm,energy,denergy";
inline constexpr const char* kProfileCsvHeader = "lambda,energy,slope,res_norm";
inline constexpr const char* kComparisonCsvHeader =
    "variant,converged,newton_u_total,newton_alpha_total,staggered_iters,residual_evals_per_iter,"
    "energy_evals_per_iter,failure_cause";

/// Writers throw IoError on unwritable paths and ConfigError on empty input.
void write_step_csv(const std::vector<StepRecord>& records, const std::filesystem::path& path);
void write_path_csv(const StaggeredPath& path_records, const std::filesystem::path& path);
void write_profile_csv(const std::vector<ProfileRow>& rows, const std::filesystem::path& path);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);

/// Readers for the same formats; only the CSV columns are restored.
std::vector<StepRecord> read_step_csv(const std::filesystem::path& path);
StaggeredPath read_path_csv(const std::filesystem::path& path);
std::vector<ProfileRow> read_profile_csv(const std::filesystem::path& path);
std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& path);

void write_vtk(const Mesh& mesh, const State& state, const std::filesystem::path& path);

struct Checkpoint {
  std::uint64_t config_hash = 0;
  int step = 0;  ///< last converged step contained in `state`
  State state;
};

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
/// Throws CheckpointError on a missing or malformed file.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// FNV-1a 64-bit.
std::uint64_t fnv1a(const std::string& text);

/// Appends timestamped lines to a log file; also echoes to stderr when verbose.
class RunLog {
 public:
  RunLog() = default;
  RunLog(const std::filesystem::path& path, bool verbose);
  void line(const std::string& text);

 private:
  std::ofstream out_;
  bool verbose_ = false;
};

}  // namespace pff
