#pragma once

// Benchmark setups: load program, boundary conditions and initial cracks.

#include <string>
#include <string_view>
#include <vector>

#include "pff/assembly.hpp"
#include "pff/material.hpp"
#include "pff/mesh.hpp"

namespace pff {

enum class CaseKind { Nucleation, Sliding, Imported };

std::string_view to_string(CaseKind k);
CaseKind parse_case(std::string_view text);

struct LoadProgram {
  int steps = 100;
  double max_load = 1.0;    ///< load factor reached at the last step
  double stop_alpha = 0.0;  ///< stop once max alpha >= this; <= 0 disables

  /// Load factor of step n (1-based); uniform ramp from 0.
  double load_factor(int n) const { return max_load * n / steps; }
  void validate() const;

  friend bool operator==(const LoadProgram&, const LoadProgram&) = default;
};

/// A Dirichlet condition whose value is multiplied by the load factor
/// (scaled) or held fixed.
struct LoadedCondition {
  DirichletCondition bc;
  bool scaled = true;

  friend bool operator==(const LoadedCondition&, const LoadedCondition&) = default;
};

struct BenchmarkCase {
  CaseKind kind = CaseKind::Nucleation;
  Mesh mesh;
  MaterialModel material;
  LoadProgram load;
  std::vector<LoadedCondition> conditions;
  std::vector<int> crack_nodes;  ///< alpha_prev = alpha = 1 initially
  std::string reaction_set = "left";
  Field reaction_component = Field::Ux;
  double reference_displacement = 0.1;  ///< reported applied displacement at load factor 1

  std::vector<DirichletCondition> dirichlet_at(double load_factor) const;
  /// ell over the smallest element edge.
  double ell_over_h() const;
  /// Initial state: zero displacement, cracks set, Dirichlet values at t = 0.
  State initial_state() const;
};

/// Square [0, L]^2 with opposite edges displaced by -/+ (cos a, sin a) L/10 * t,
/// alpha = 0 on the four corners, reaction Ux on the left edge.
BenchmarkCase make_nucleation_case(const MaterialModel& m, int nx, int ny, const LoadProgram& load,
                                   double length = 1.0, double angle_deg = 320.0);

/// Square [0, L]^2 with a full-width initial crack on the middle node row,
/// bottom edge clamped, top edge moved by (d, -d / 2) * t with d = L/10;
/// reaction Ux on the top edge. ny must be even.
BenchmarkCase make_sliding_case(const MaterialModel& m, int nx, int ny, const LoadProgram& load, double length = 1.0);

/// Sliding material: Gc = 4/75 N/mm.
MaterialModel sliding_material(SplitKind split, double gamma_star = 0.0);

}  // namespace pff
