#include "pff/cases.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pff/errors.hpp"

namespace pff {

std::string_view to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Nucleation: return "nucleation";
    case CaseKind::Sliding: return "sliding";
    case CaseKind::Imported: return "imported-mesh";
  }
  return "unknown";
}

CaseKind parse_case(std::string_view text) {
  if (text == "nucleation") return CaseKind::Nucleation;
  if (text == "sliding") return CaseKind::Sliding;
  if (text == "imported-mesh") return CaseKind::Imported;
  throw ConfigError("unknown case '" + std::string(text) + "' (expected nucleation, sliding or imported-mesh)");
}

void LoadProgram::validate() const {
  std::vector<std::string> problems;
  if (steps < 1) problems.emplace_back("steps must be >= 1");
  if (!(max_load > 0.0) || !std::isfinite(max_load)) problems.emplace_back("max_load must be positive");
  if (!std::isfinite(stop_alpha)) problems.emplace_back("stop_alpha must be finite");
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid load program:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

std::vector<DirichletCondition> BenchmarkCase::dirichlet_at(double load_factor) const {
  std::vector<DirichletCondition> out;
  out.reserve(conditions.size());
  for (const auto& c : conditions) {
    DirichletCondition bc = c.bc;
    if (c.scaled) bc.value *= load_factor;
    out.push_back(bc);
  }
  return out;
}

double BenchmarkCase::ell_over_h() const { return material.ell / mesh.min_edge_length(); }

State BenchmarkCase::initial_state() const {
  State s = State::zeros(mesh);
  for (int n : crack_nodes) {
    s.alpha[n] = 1.0;
    s.alpha_prev[n] = 1.0;
  }
  set_dirichlet_values(mesh, s, dirichlet_at(0.0));
  return s;
}

BenchmarkCase make_nucleation_case(const MaterialModel& m, int nx, int ny, const LoadProgram& load, double length,
                                   double angle_deg) {
  BenchmarkCase c;
  c.kind = CaseKind::Nucleation;
  c.mesh = build_structured_mesh(nx, ny, length, length);
  c.material = m;
  c.load = load;
  const double angle = angle_deg * std::numbers::pi / 180.0;
  const double ux = std::cos(angle) * length / 10.0;
  const double uy = std::sin(angle) * length / 10.0;
  c.conditions = {
      {{"left", Field::Ux, -ux}, true},
      {{"right", Field::Ux, ux}, true},
      {{"bottom", Field::Uy, -uy}, true},
      {{"top", Field::Uy, uy}, true},
      {{"corners", Field::Alpha, 0.0}, false},
  };
  c.reaction_set = "left";
  c.reaction_component = Field::Ux;
  c.reference_displacement = length / 10.0;
  return c;
}

BenchmarkCase make_sliding_case(const MaterialModel& m, int nx, int ny, const LoadProgram& load, double length) {
  if (ny % 2 != 0) throw ConfigError("sliding case needs an even ny so the crack lies on a node row");
  BenchmarkCase c;
  c.kind = CaseKind::Sliding;
  c.mesh = build_structured_mesh(nx, ny, length, length);
  c.material = m;
  c.load = load;
  const double d = length / 10.0;
  c.conditions = {
      {{"bottom", Field::Ux, 0.0}, false},
      {{"bottom", Field::Uy, 0.0}, false},
      {{"top", Field::Ux, d}, true},
      {{"top", Field::Uy, -0.5 * d}, true},
  };
  const int row = ny / 2;
  for (int i = 0; i <= nx; ++i) c.crack_nodes.push_back(row * (nx + 1) + i);
  c.mesh.node_sets["crack"] = c.crack_nodes;
  c.reaction_set = "top";
  c.reaction_component = Field::Ux;
  c.reference_displacement = d;
  return c;
}

MaterialModel sliding_material(SplitKind split, double gamma_star) {
  MaterialModel m;
  m.Gc = 4.0 / 75.0;
  m.split = split;
  m.gamma_star = gamma_star;
  return m;
}

}  // namespace pff
