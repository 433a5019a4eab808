#pragma once

// Quadrilateral meshes and the PFMESH text format.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pff {

struct Mesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 4>> quads;  ///< counter-clockwise node indices
  std::map<std::string, std::vector<int>> node_sets;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(quads.size()); }

  /// Throws ConfigError for an unknown set name.
  const std::vector<int>& node_set(const std::string& name) const;
  bool has_node_set(const std::string& name) const { return node_sets.count(name) != 0; }

  /// Checks index ranges, set uniqueness and positive Jacobians at the
  /// 2x2 Gauss points. Throws ConfigError.
  void validate() const;

  /// Smallest element edge length.
  double min_edge_length() const;

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// nx * ny bilinear quads on [0, Lx] x [0, Ly]. Node (i, j) has index
/// j * (nx + 1) + i. Sets: left, right, bottom, top, corner_bl, corner_br,
/// corner_tr, corner_tl and corners.
Mesh build_structured_mesh(int nx, int ny, double Lx, double Ly);

/// PFMESH 1 format; throws IoError / ConfigError.
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace pff
