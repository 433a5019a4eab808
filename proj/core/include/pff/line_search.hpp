#pragma once

// Line searches along a Newton ray w + lambda dw, lambda in (0, 1].

#include <functional>
#include <string_view>
#include <vector>

namespace pff {

enum class LineSearchKind {
  FullStep,
  Bisection,
  BacktrackingResidual,
  BacktrackingEnergy,
  SecantL2,
  SecantEnergy,
  CriticalPoint,
};

std::string_view to_string(LineSearchKind k);
/// Accepts full, bisection, backtracking-residual, backtracking-energy,
/// secant-l2, secant-energy and cp. Throws ConfigError.
LineSearchKind parse_line_search(std::string_view text);

struct LineSearchSettings {
  LineSearchKind kind = LineSearchKind::Bisection;
  double atol = 1e-12;  ///< on |phi'| / ||dw||
  double rtol = 0.0;    ///< on |phi'(lambda) / phi'(0)|; <= 0 disables
  double ltol = 1e-6;   ///< on |lambda_l - lambda_{l-1}|
  int max_iter = 20;
  double mu = 1e-4;  ///< sufficient-decrease constant (backtracking)

  /// Defaults for a variant: max_iter 20 for bisection and 10 otherwise,
  /// mu = 1 for energy backtracking.
  static LineSearchSettings defaults(LineSearchKind kind);
  void validate() const;

  friend bool operator==(const LineSearchSettings&, const LineSearchSettings&) = default;
};

/// phi(lambda) = E(w + lambda dw) and friends. Implementations count the
/// residual and energy assemblies they perform.
class RayFunction {
 public:
  virtual ~RayFunction() = default;
  virtual double energy(double lambda) = 0;
  /// phi'(lambda) = R(w + lambda dw) . dw (or the bounded variant).
  virtual double slope(double lambda) = 0;
  virtual double residual_norm_sq(double lambda) = 0;
  virtual double direction_norm() const = 0;
  /// Derivative of ||R||^2 / 2 at lambda = 0; -||R(w)||^2 for an exact Newton direction.
  virtual double residual_objective_slope0() { return -residual_norm_sq(0.0); }

  int residual_evaluations() const { return residual_evals_; }
  int energy_evaluations() const { return energy_evals_; }

 protected:
  int residual_evals_ = 0;
  int energy_evals_ = 0;
};

/// Ray given by callables; counts one residual evaluation per slope or
/// residual-norm call at a new lambda.
class FunctionRay : public RayFunction {
 public:
  FunctionRay(std::function<double(double)> energy, std::function<double(double)> slope, double direction_norm,
              std::function<double(double)> residual_norm_sq = {});
  double energy(double lambda) override;
  double slope(double lambda) override;
  double residual_norm_sq(double lambda) override;
  double direction_norm() const override { return direction_norm_; }

 private:
  std::function<double(double)> energy_, slope_, residual_norm_sq_;
  double direction_norm_;
};

struct LineSearchStep {
  double lambda = 0.0;
  double value = 0.0;  ///< phi' for bisection/cp, the objective otherwise
  double left = 0.0;   ///< bisection bracket that lambda bisected
  double right = 0.0;
};

struct LineSearchResult {
  double lambda = 1.0;
  int iterations = 0;
  bool failed = false;    ///< backtracking exhausted its halvings
  bool fallback = false;  ///< a secant iteration fell back to halving
  double initial_slope = 0.0;
  double final_slope = 0.0;  ///< last evaluated phi' (bisection, cp)
  std::vector<LineSearchStep> steps;
  int residual_evaluations = 0;
  int energy_evaluations = 0;
};

/// Thrown (as NotDescentError) when phi'(0) >= 0.
LineSearchResult bisection_line_search(RayFunction& ray, const LineSearchSettings& s);

enum class BacktrackingObjective { ResidualSquared, Energy };
LineSearchResult backtracking_line_search(RayFunction& ray, BacktrackingObjective objective,
                                          const LineSearchSettings& s);

enum class SecantVariant { L2, Energy, CriticalPoint };
LineSearchResult secant_line_search(RayFunction& ray, SecantVariant variant, const LineSearchSettings& s);

/// Dispatches on s.kind; FullStep returns lambda = 1 without evaluations.
LineSearchResult run_line_search(RayFunction& ray, const LineSearchSettings& s);

}  // namespace pff
