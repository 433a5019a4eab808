#include "pff/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pff/errors.hpp"

namespace pff {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  int line;
};

using Setter = std::function<void(const std::string&)>;

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s = {"",       "mesh",   "material", "loading",  "solver", "linesearch.mechanical",
                                          "linesearch.damage", "output", "dirichlet"};
  return s;
}

std::map<std::string, Setter> line_search_setters(LineSearchSettings& ls) {
  return {
      {"atol", [&](const std::string& v) { ls.atol = parse_double(v); }},
      {"rtol", [&](const std::string& v) { ls.rtol = parse_double(v); }},
      {"ltol", [&](const std::string& v) { ls.ltol = parse_double(v); }},
      {"max_iter", [&](const std::string& v) { ls.max_iter = parse_int(v); }},
      {"mu", [&](const std::string& v) { ls.mu = parse_double(v); }},
  };
}

}  // namespace

RunConfig default_config(CaseKind kind) {
  RunConfig c;
  c.kind = kind;
  if (kind == CaseKind::Sliding) {
    c.material.Gc = 4.0 / 75.0;
    c.reaction_set = "top";
  }
  if (kind == CaseKind::Imported) c.reference_displacement = 1.0;
  return c;
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      problems.emplace_back(e.what());
    }
  };
  if (kind != CaseKind::Imported) {
    if (nx < 1) problems.emplace_back("mesh.nx must be >= 1");
    if (ny < 1) problems.emplace_back("mesh.ny must be >= 1");
    if (!(length > 0.0)) problems.emplace_back("mesh.length must be positive");
    if (kind == CaseKind::Sliding && ny % 2 != 0) problems.emplace_back("mesh.ny must be even for the sliding case");
    if (!dirichlet.empty()) problems.emplace_back("[dirichlet] is only allowed for the imported-mesh case");
  } else {
    if (mesh_file.empty()) {
      problems.emplace_back("mesh.file is required for the imported-mesh case");
    } else if (!std::filesystem::exists(mesh_file)) {
      problems.emplace_back("mesh.file '" + mesh_file + "' does not exist");
    }
    if (dirichlet.empty()) problems.emplace_back("imported-mesh case needs a [dirichlet] section");
  }
  if (reaction_component == Field::Alpha) problems.emplace_back("loading.reaction_component must be ux or uy");
  if (!std::isfinite(angle_deg)) problems.emplace_back("loading.angle_deg must be finite");
  if (!std::isfinite(reference_displacement)) problems.emplace_back("loading.reference_displacement must be finite");
  if (output.directory.empty()) problems.emplace_back("output.directory must not be empty");
  collect([&] { material.validate(); });
  collect([&] { load.validate(); });
  collect([&] { solver.validate(); });
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  std::vector<std::string> errors;
  auto error_at = [&](int line, const std::string& msg) { errors.push_back("line " + std::to_string(line) + ": " + msg); };

  std::map<std::string, std::vector<std::pair<std::string, Entry>>> sections;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        error_at(line_no, "malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections().count(section)) error_at(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      error_at(line_no, "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      error_at(line_no, "empty key");
      continue;
    }
    if (!seen.insert({section, key}).second) {
      error_at(line_no, "duplicate key '" + key + "'");
      continue;
    }
    sections[section].push_back({key, {value, line_no}});
  }

  CaseKind kind = CaseKind::Nucleation;
  for (const auto& [key, entry] : sections[""]) {
    if (key == "case") {
      try {
        kind = parse_case(entry.value);
      } catch (const ConfigError& e) {
        error_at(entry.line, e.what());
      }
    }
  }
  RunConfig c = default_config(kind);

  auto apply = [&](const std::string& name, std::map<std::string, Setter> setters) {
    const std::string label = name.empty() ? std::string("top level") : "[" + name + "]";
    for (const auto& [key, entry] : sections[name]) {
      auto it = setters.find(key);
      if (it == setters.end()) {
        error_at(entry.line, "unknown key '" + key + "' in " + label);
        continue;
      }
      try {
        it->second(entry.value);
      } catch (const ConfigError& e) {
        error_at(entry.line, key + ": " + e.what());
      }
    }
  };

  apply("", {{"case", [](const std::string&) {}}});
  apply("mesh", {
                    {"nx", [&](const std::string& v) { c.nx = parse_int(v); }},
                    {"ny", [&](const std::string& v) { c.ny = parse_int(v); }},
                    {"length", [&](const std::string& v) { c.length = parse_double(v); }},
                    {"file",
                     [&](const std::string& v) {
                       std::filesystem::path p(v);
                       if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                       c.mesh_file = p.string();
                     }},
                });
  MaterialModel& m = c.material;
  apply("material", {
                        {"E0", [&](const std::string& v) { m.E0 = parse_double(v); }},
                        {"nu0", [&](const std::string& v) { m.nu0 = parse_double(v); }},
                        {"Gc", [&](const std::string& v) { m.Gc = parse_double(v); }},
                        {"ell", [&](const std::string& v) { m.ell = parse_double(v); }},
                        {"a0", [&](const std::string& v) { m.a0 = parse_double(v); }},
                        {"dissipation", [&](const std::string& v) { m.dissipation = parse_dissipation(v); }},
                        {"split", [&](const std::string& v) { m.split = parse_split(v); }},
                        {"gamma_star", [&](const std::string& v) { m.gamma_star = parse_double(v); }},
                        {"gamma_dp", [&](const std::string& v) { m.gamma_dp = parse_double(v); }},
                    });
  apply("loading", {
                       {"steps", [&](const std::string& v) { c.load.steps = parse_int(v); }},
                       {"max_load", [&](const std::string& v) { c.load.max_load = parse_double(v); }},
                       {"stop_alpha", [&](const std::string& v) { c.load.stop_alpha = parse_double(v); }},
                       {"angle_deg", [&](const std::string& v) { c.angle_deg = parse_double(v); }},
                       {"reference_displacement",
                        [&](const std::string& v) { c.reference_displacement = parse_double(v); }},
                       {"reaction_set", [&](const std::string& v) { c.reaction_set = v; }},
                       {"reaction_component", [&](const std::string& v) { c.reaction_component = parse_field(v); }},
                       {"crack_sets", [&](const std::string& v) { c.crack_sets = split_list(v); }},
                   });
  StaggeredSettings& s = c.solver;
  apply("solver", {
                      {"irreversibility", [&](const std::string& v) { s.irreversibility = parse_irreversibility(v); }},
                      {"tol_staggered", [&](const std::string& v) { s.tol = parse_double(v); }},
                      {"max_staggered", [&](const std::string& v) { s.max_iter = parse_int(v); }},
                      {"tol_newton", [&](const std::string& v) { s.newton.tol = parse_double(v); }},
                      {"max_newton", [&](const std::string& v) { s.newton.max_iter = parse_int(v); }},
                      {"active_set_tol", [&](const std::string& v) { s.newton.active_set_tol = parse_double(v); }},
                      {"tol_ir", [&](const std::string& v) { s.penalty.tol_ir = parse_double(v); }},
                  });
  for (auto [name, target] : {std::pair{std::string("linesearch.mechanical"), &s.ls_mechanical},
                              std::pair{std::string("linesearch.damage"), &s.ls_damage}}) {
    auto setters = line_search_setters(*target);
    setters["variant"] = [](const std::string&) {};
    for (const auto& [key, entry] : sections[name]) {
      if (key != "variant") continue;
      try {
        *target = LineSearchSettings::defaults(parse_line_search(entry.value));
      } catch (const ConfigError& e) {
        error_at(entry.line, key + ": " + e.what());
      }
    }
    apply(name, setters);
  }
  apply("output", {
                      {"directory", [&](const std::string& v) { c.output.directory = v; }},
                      {"csv", [&](const std::string& v) { c.output.csv = parse_bool(v); }},
                      {"vtk", [&](const std::string& v) { c.output.vtk = parse_bool(v); }},
                      {"profiles", [&](const std::string& v) { c.output.profiles = parse_bool(v); }},
                  });
  for (const auto& [key, entry] : sections["dirichlet"]) {
    try {
      const auto dot = key.rfind('.');
      if (dot == std::string::npos || dot == 0) throw ConfigError("expected '<node set>.<ux|uy|alpha>'");
      LoadedCondition lc;
      lc.bc.node_set = key.substr(0, dot);
      lc.bc.field = parse_field(key.substr(dot + 1));
      std::string v = entry.value;
      if (v.rfind("fixed", 0) == 0) {
        lc.scaled = false;
        v = trim(v.substr(5));
      }
      lc.bc.value = parse_double(v);
      c.dirichlet.push_back(lc);
    } catch (const ConfigError& e) {
      error_at(entry.line, key + ": " + e.what());
    }
  }

  if (errors.empty()) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      errors.emplace_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::ostringstream os;
    os << "configuration errors:";
    for (const auto& e : errors) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "case = " << to_string(c.kind) << "\n";
  os << "\n[mesh]\n";
  os << "nx = " << c.nx << "\nny = " << c.ny << "\nlength = " << fmt(c.length) << "\n";
  if (!c.mesh_file.empty()) os << "file = " << c.mesh_file << "\n";
  const MaterialModel& m = c.material;
  os << "\n[material]\n";
  os << "E0 = " << fmt(m.E0) << "\nnu0 = " << fmt(m.nu0) << "\nGc = " << fmt(m.Gc) << "\nell = " << fmt(m.ell)
     << "\na0 = " << fmt(m.a0) << "\ndissipation = " << to_string(m.dissipation) << "\nsplit = " << to_string(m.split)
     << "\ngamma_star = " << fmt(m.gamma_star) << "\ngamma_dp = " << fmt(m.gamma_dp) << "\n";
  os << "\n[loading]\n";
  os << "steps = " << c.load.steps << "\nmax_load = " << fmt(c.load.max_load) << "\nstop_alpha = "
     << fmt(c.load.stop_alpha) << "\nangle_deg = " << fmt(c.angle_deg)
     << "\nreference_displacement = " << fmt(c.reference_displacement) << "\nreaction_set = " << c.reaction_set
     << "\nreaction_component = " << to_string(c.reaction_component) << "\n";
  if (!c.crack_sets.empty()) {
    os << "crack_sets = ";
    for (std::size_t i = 0; i < c.crack_sets.size(); ++i) os << (i ? ", " : "") << c.crack_sets[i];
    os << "\n";
  }
  const StaggeredSettings& s = c.solver;
  os << "\n[solver]\n";
  os << "irreversibility = " << to_string(s.irreversibility) << "\ntol_staggered = " << fmt(s.tol)
     << "\nmax_staggered = " << s.max_iter << "\ntol_newton = " << fmt(s.newton.tol)
     << "\nmax_newton = " << s.newton.max_iter << "\nactive_set_tol = " << fmt(s.newton.active_set_tol)
     << "\ntol_ir = " << fmt(s.penalty.tol_ir) << "\n";
  for (auto [name, ls] : {std::pair{"linesearch.mechanical", &s.ls_mechanical},
                          std::pair{"linesearch.damage", &s.ls_damage}}) {
    os << "\n[" << name << "]\n";
    os << "variant = " << to_string(ls->kind) << "\natol = " << fmt(ls->atol) << "\nrtol = " << fmt(ls->rtol)
       << "\nltol = " << fmt(ls->ltol) << "\nmax_iter = " << ls->max_iter << "\nmu = " << fmt(ls->mu) << "\n";
  }
  os << "\n[output]\n";
  os << "directory = " << c.output.directory << "\ncsv = " << (c.output.csv ? "true" : "false")
     << "\nvtk = " << (c.output.vtk ? "true" : "false") << "\nprofiles = " << (c.output.profiles ? "true" : "false")
     << "\n";
  if (!c.dirichlet.empty()) {
    os << "\n[dirichlet]\n";
    for (const auto& d : c.dirichlet) {
      os << d.bc.node_set << "." << to_string(d.bc.field) << " = " << (d.scaled ? "" : "fixed ") << fmt(d.bc.value)
         << "\n";
    }
  }
  return os.str();
}

}  // namespace pff
