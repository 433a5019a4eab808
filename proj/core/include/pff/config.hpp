#pragma once

// Run configuration: flat `key = value` lines grouped under [section]
// headers, '#' comments. Unknown sections and keys are rejected.
//
//   case = nucleation            # nucleation | sliding | imported-mesh
//   [mesh]        nx, ny, length, file
//   [material]    E0, nu0, Gc, ell, a0, dissipation, split, gamma_star, gamma_dp
//   [loading]     steps, max_load, stop_alpha, angle_deg, reference_displacement,
//                 reaction_set, reaction_component, crack_sets
//   [solver]      irreversibility, tol_staggered, max_staggered, tol_newton,
//                 max_newton, active_set_tol, tol_ir
//   [linesearch.mechanical] / [linesearch.damage]
//                 variant, atol, rtol, ltol, max_iter, mu
//   [output]      directory, csv, vtk, profiles
//   [dirichlet]   <node set>.<ux|uy|alpha> = [fixed] <value>   (imported-mesh only)

#include <filesystem>
#include <string>
#include <vector>

#include "pff/cases.hpp"
#include "pff/material.hpp"
#include "pff/staggered.hpp"

namespace pff {

struct OutputSettings {
  std::string directory = "out";
  bool csv = true;
  bool vtk = false;
  bool profiles = false;

  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct RunConfig {
  CaseKind kind = CaseKind::Nucleation;
  int nx = 50;
  int ny = 50;
  double length = 1.0;
  std::string mesh_file;  ///< imported-mesh only; relative to the config file
  MaterialModel material;
  LoadProgram load;
  double angle_deg = 320.0;
  double reference_displacement = 0.0;  ///< imported-mesh reporting scale
  std::string reaction_set = "left";
  Field reaction_component = Field::Ux;
  std::vector<std::string> crack_sets;
  std::vector<LoadedCondition> dirichlet;
  StaggeredSettings solver;
  OutputSettings output;

  /// Throws ConfigError listing every violated range.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Defaults for a case: sliding uses Gc = 4/75 and the top-edge reaction.
RunConfig default_config(CaseKind kind);

/// Parses config text. `base_dir` resolves relative mesh paths. Errors are
/// collected with line numbers and thrown together as ConfigError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Lossless text form: parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

}  // namespace pff
