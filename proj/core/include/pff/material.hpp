#pragma once

// Pointwise constitutive layer: degradation and dissipation functions and the
// decomposed elastic energy density psi = a(alpha) psi_D + psi_R.
//
// Voigt convention: strain vector (eps_xx, eps_yy, 2 eps_xy), stress vector
// (sig_xx, sig_yy, sig_xy). Tangents are 3x3 derivatives of the stress
// vector with respect to the strain vector, hence symmetric Hessians.

#include <Eigen/Core>
#include <string>
#include <string_view>

#include "pff/tensor.hpp"

namespace pff {

enum class Dissipation { AT1, AT2 };

enum class SplitKind { None, VolDev, Spectral, StarConvex, NoTension, DPLike };

std::string_view to_string(Dissipation d);
std::string_view to_string(SplitKind s);
Dissipation parse_dissipation(std::string_view text);
SplitKind parse_split(std::string_view text);

struct MaterialModel {
  double E0 = 100.0;    ///< Young's modulus [MPa]
  double nu0 = 0.3;     ///< Poisson's ratio [-]
  double Gc = 0.1;      ///< fracture toughness [N/mm]
  double ell = 0.05;    ///< regularization length [mm]
  double a0 = 1e-6;     ///< residual stiffness in a(alpha)
  Dissipation dissipation = Dissipation::AT1;
  SplitKind split = SplitKind::VolDev;
  double gamma_star = 0.0;  ///< star-convex parameter, >= -1
  double gamma_dp = 0.0;    ///< DP-like cone opening, >= 0

  double mu() const { return E0 / (2.0 * (1.0 + nu0)); }
  double lambda() const { return E0 * nu0 / ((1.0 + nu0) * (1.0 - 2.0 * nu0)); }
  double kappa() const { return lambda() + 2.0 * mu() / 3.0; }
  double cw() const { return dissipation == Dissipation::AT1 ? 8.0 / 3.0 : 2.0; }

  /// Throws ConfigError listing every violated constraint.
  void validate() const;

  friend bool operator==(const MaterialModel&, const MaterialModel&) = default;
};

using Voigt = Eigen::Vector3d;
using VoigtTangent = Eigen::Matrix3d;

Voigt to_voigt(const SymStrain& e);
SymStrain from_voigt(const Voigt& v);

/// How much of SplitEval to fill in.
enum class EvalLevel { Energy, Stress, Tangent };

struct SplitEval {
  double psi_D = 0.0;
  double psi_R = 0.0;
  Voigt sigma_D = Voigt::Zero();
  Voigt sigma_R = Voigt::Zero();
  VoigtTangent C_D = VoigtTangent::Zero();
  VoigtTangent C_R = VoigtTangent::Zero();
};

/// a(alpha) = (1 - alpha)^2 + a0 and its first two derivatives.
/// Throws ConfigError for alpha outside [0, 1] (with 1e-12 slack) or order > 2.
double degradation(double alpha, int order, double a0 = 1e-6);

/// w(alpha) for AT1 (alpha) and AT2 (alpha^2) and derivatives; same checks.
double dissipation(double alpha, Dissipation model, int order);

namespace detail {
// Unchecked polynomial extensions used by the assembly, where penalized
// iterates may leave [0, 1] transiently.
constexpr double degradation(double alpha, int order, double a0) {
  switch (order) {
    case 0: return (1.0 - alpha) * (1.0 - alpha) + a0;
    case 1: return -2.0 * (1.0 - alpha);
    default: return 2.0;
  }
}
constexpr double dissipation(double alpha, Dissipation model, int order) {
  if (model == Dissipation::AT1) return order == 0 ? alpha : (order == 1 ? 1.0 : 0.0);
  return order == 0 ? alpha * alpha : (order == 1 ? 2.0 * alpha : 2.0);
}
}  // namespace detail

/// Undamaged energy psi_0 = kappa/2 tr^2 + mu |dev|^2 and its stress.
double psi0(const SymStrain& e, const MaterialModel& m);
Voigt sigma0(const SymStrain& e, const MaterialModel& m);
VoigtTangent tangent0(const MaterialModel& m);

/// Split evaluation for None, VolDev, Spectral and StarConvex (closed form)
/// and dispatch to cone_split for NoTension and DPLike.
SplitEval evaluate_split(const SymStrain& e, const MaterialModel& m, EvalLevel level = EvalLevel::Tangent);

/// Cone splits: psi_R = min over eta in the cone of psi_0(eps - eta).
/// Tangents come from central differences of the stresses.
SplitEval cone_split(const SymStrain& e, const MaterialModel& m, EvalLevel level = EvalLevel::Tangent);

/// Optimal structured deformation eta* of a cone split, as a 3D tensor.
SymTensor3 cone_optimal_eta(const SymStrain& e, const MaterialModel& m);

}  // namespace pff
