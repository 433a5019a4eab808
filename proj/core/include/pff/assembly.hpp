#pragma once

// Bilinear quad discretization of the phase-field energy
//
//   E = sum_e sum_qp w detJ [ a(alpha) psi_D + psi_R
//                             + Gc / c_w (w(alpha) / ell + ell |grad alpha|^2) ]
//
// with 2x2 Gauss quadrature, nodal displacements (2 per node, x then y) and
// nodal damage. Residuals and stiffness blocks are the exact first and second
// derivatives. Dirichlet DOFs are eliminated through DofMap.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pff/material.hpp"
#include "pff/mesh.hpp"
#include "pff/sparse.hpp"

namespace pff {

enum class Field { Ux, Uy, Alpha };

std::string_view to_string(Field f);
Field parse_field(std::string_view text);

struct DirichletCondition {
  std::string node_set;
  Field field = Field::Ux;
  double value = 0.0;

  friend bool operator==(const DirichletCondition&, const DirichletCondition&) = default;
};

/// Free/constrained split of a DOF vector.
struct DofMap {
  std::vector<int> free_to_full;
  std::vector<int> full_to_free;  ///< -1 for constrained entries

  int num_full() const { return static_cast<int>(full_to_free.size()); }
  int num_free() const { return static_cast<int>(free_to_full.size()); }
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;
  /// Writes the free entries of `full` from `free`; constrained entries are kept.
  void scatter(const Eigen::VectorXd& free, Eigen::VectorXd& full) const;
};

struct Constraints {
  DofMap u;
  DofMap alpha;
};

struct State {
  Eigen::VectorXd u;           ///< 2 * num_nodes, [mm]
  Eigen::VectorXd alpha;       ///< num_nodes
  Eigen::VectorXd alpha_prev;  ///< num_nodes

  static State zeros(const Mesh& mesh);
  /// Throws ConfigError on length mismatch or alpha_prev outside [0, 1].
  void validate(const Mesh& mesh) const;

  friend bool operator==(const State& a, const State& b) {
    return a.u == b.u && a.alpha == b.alpha && a.alpha_prev == b.alpha_prev;
  }
};

/// Writes the prescribed values into `state`. Throws ConfigError on unknown sets.
void set_dirichlet_values(const Mesh& mesh, State& state, const std::vector<DirichletCondition>& bcs);

/// set_dirichlet_values plus the free/constrained DOF maps.
Constraints apply_dirichlet(const Mesh& mesh, State& state, const std::vector<DirichletCondition>& bcs);

/// Quadratic penalty (epsilon / 2) <alpha - alpha_prev>_-^2 on the damage,
/// integrated with the lumped (nodal) quadrature.
struct PenaltySettings {
  double tol_ir = 1e-4;

  /// epsilon = (Gc / ell) * 27 / (64 tol_ir^2).
  double epsilon(const MaterialModel& m) const { return m.Gc / m.ell * 27.0 / (64.0 * tol_ir * tol_ir); }

  friend bool operator==(const PenaltySettings&, const PenaltySettings&) = default;
};

/// Shape-function data at one quadrature point.
struct QuadPoint {
  double N[4];
  double dNdx[4];
  double dNdy[4];
  double wdetJ;
};

class Assembler {
 public:
  Assembler(Mesh mesh, MaterialModel material, Constraints constraints);

  const Mesh& mesh() const { return mesh_; }
  const MaterialModel& material() const { return material_; }
  const Constraints& constraints() const { return constraints_; }
  const std::vector<QuadPoint>& quad_points() const { return qp_; }

  /// Total energy; a non-null penalty adds the irreversibility penalty.
  double energy(const State& s, const PenaltySettings* penalty = nullptr) const;

  Eigen::VectorXd residual_u_full(const State& s) const;
  Eigen::VectorXd residual_u(const State& s) const;
  Eigen::VectorXd residual_alpha_full(const State& s, const PenaltySettings* penalty = nullptr) const;
  Eigen::VectorXd residual_alpha(const State& s, const PenaltySettings* penalty = nullptr) const;

  /// Free-DOF stiffness blocks. Without penalty K_aa depends on u only.
  SparseSymMatrix stiffness_u(const State& s) const;
  SparseSymMatrix stiffness_alpha(const State& s, const PenaltySettings* penalty = nullptr) const;

  /// Sum of full-space R_u entries of one displacement component on a node set.
  double reaction(const State& s, const std::string& node_set, Field component) const;

  /// Discrete L2 norm (consistent mass) of a nodal scalar field.
  double l2_norm(const Eigen::VectorXd& nodal) const;

  /// Largest psi_D over all quadrature points.
  double max_psi_D(const State& s) const;

  /// Sum of w detJ.
  double area() const;

 private:
  /// Row sum of the element mass matrix at node a; the penalty term uses
  /// this nodal quadrature.
  double lumped_weight(int e, int a) const;

  Mesh mesh_;
  MaterialModel material_;
  Constraints constraints_;
  std::vector<QuadPoint> qp_;  ///< 4 per element
  SparseSymMatrix pattern_u_, pattern_alpha_;
  std::vector<std::vector<int>> scatter_u_, scatter_alpha_;
  std::vector<std::vector<int>> free_dofs_u_, free_dofs_alpha_;
};

/// Number of assembly workers: PFF_THREADS if set, else hardware concurrency.
int assembly_threads();

}  // namespace pff
