#include "pff/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "pff/errors.hpp"

namespace pff {

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw ConfigError("unknown node set '" + name + "'");
  return it->second;
}

void Mesh::validate() const {
  const int n = num_nodes();
  std::vector<std::string> problems;
  const double g = 1.0 / std::sqrt(3.0);
  const double gp[4][2] = {{-g, -g}, {g, -g}, {g, g}, {-g, g}};
  for (int e = 0; e < num_elements(); ++e) {
    const auto& q = quads[e];
    bool in_range = true;
    for (int a : q) in_range = in_range && a >= 0 && a < n;
    if (!in_range) {
      problems.push_back("element " + std::to_string(e) + " references a node out of range");
      continue;
    }
    for (const auto& p : gp) {
      const double xi = p[0], eta = p[1];
      const double dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
      const double deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
      double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
      for (int a = 0; a < 4; ++a) {
        j11 += dxi[a] * nodes[q[a]][0];
        j12 += dxi[a] * nodes[q[a]][1];
        j21 += deta[a] * nodes[q[a]][0];
        j22 += deta[a] * nodes[q[a]][1];
      }
      if (!(j11 * j22 - j12 * j21 > 0.0)) {
        problems.push_back("element " + std::to_string(e) + " has a non-positive Jacobian");
        break;
      }
    }
  }
  for (const auto& [name, ids] : node_sets) {
    std::set<int> seen;
    for (int id : ids) {
      if (id < 0 || id >= n) {
        problems.push_back("node set '" + name + "' references node " + std::to_string(id) + " out of range");
      } else if (!seen.insert(id).second) {
        problems.push_back("node set '" + name + "' repeats node " + std::to_string(id));
      }
    }
  }
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid mesh:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

double Mesh::min_edge_length() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& q : quads) {
    for (int a = 0; a < 4; ++a) {
      const auto& p = nodes[q[a]];
      const auto& r = nodes[q[(a + 1) % 4]];
      h = std::min(h, std::hypot(p[0] - r[0], p[1] - r[1]));
    }
  }
  return h;
}

Mesh build_structured_mesh(int nx, int ny, double Lx, double Ly) {
  if (nx < 1 || ny < 1) throw ConfigError("structured mesh needs nx, ny >= 1");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("structured mesh needs positive lengths");
  Mesh m;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) m.nodes.push_back({Lx * i / nx, Ly * j / ny});
  }
  m.quads.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) m.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  }
  auto& left = m.node_sets["left"];
  auto& right = m.node_sets["right"];
  for (int j = 0; j <= ny; ++j) {
    left.push_back(id(0, j));
    right.push_back(id(nx, j));
  }
  auto& bottom = m.node_sets["bottom"];
  auto& top = m.node_sets["top"];
  for (int i = 0; i <= nx; ++i) {
    bottom.push_back(id(i, 0));
    top.push_back(id(i, ny));
  }
  m.node_sets["corner_bl"] = {id(0, 0)};
  m.node_sets["corner_br"] = {id(nx, 0)};
  m.node_sets["corner_tr"] = {id(nx, ny)};
  m.node_sets["corner_tl"] = {id(0, ny)};
  m.node_sets["corners"] = {id(0, 0), id(nx, 0), id(nx, ny), id(0, ny)};
  return m;
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
  throw IoError("mesh file " + path.string() + ": " + what);
}

}  // namespace

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "PFMESH" || version != 1) parse_fail(path, "missing 'PFMESH 1' header");

  Mesh m;
  long count = 0;
  if (!(in >> word >> count) || word != "nodes" || count < 0) parse_fail(path, "expected 'nodes <count>'");
  m.nodes.resize(count);
  for (auto& p : m.nodes) {
    if (!(in >> p[0] >> p[1])) parse_fail(path, "truncated node list");
  }
  if (!(in >> word >> count) || word != "quads" || count < 0) parse_fail(path, "expected 'quads <count>'");
  m.quads.resize(count);
  for (auto& q : m.quads) {
    if (!(in >> q[0] >> q[1] >> q[2] >> q[3])) parse_fail(path, "truncated quad list");
  }
  while (in >> word) {
    std::string name;
    if (word != "nodeset" || !(in >> name >> count) || count < 0) parse_fail(path, "expected 'nodeset <name> <count>'");
    auto& ids = m.node_sets[name];
    ids.resize(count);
    for (int& id : ids) {
      if (!(in >> id)) parse_fail(path, "truncated node set '" + name + "'");
    }
  }
  m.validate();
  return m;
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  char buf[64];
  out << "PFMESH 1\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    out << buf;
  }
  out << "quads " << mesh.quads.size() << "\n";
  for (const auto& q : mesh.quads) out << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << "\n";
  for (const auto& [name, ids] : mesh.node_sets) {
    out << "nodeset " << name << ' ' << ids.size() << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << (i + 1 == ids.size() ? "\n" : " ");
  }
  if (!out) throw IoError("error writing mesh file " + path.string());
}

}  // namespace pff
