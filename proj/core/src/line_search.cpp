#include "pff/line_search.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "pff/errors.hpp"

namespace pff {

std::string_view to_string(LineSearchKind k) {
  switch (k) {
    case LineSearchKind::FullStep: return "full";
    case LineSearchKind::Bisection: return "bisection";
    case LineSearchKind::BacktrackingResidual: return "backtracking-residual";
    case LineSearchKind::BacktrackingEnergy: return "backtracking-energy";
    case LineSearchKind::SecantL2: return "secant-l2";
    case LineSearchKind::SecantEnergy: return "secant-energy";
    case LineSearchKind::CriticalPoint: return "cp";
  }
  return "unknown";
}

LineSearchKind parse_line_search(std::string_view text) {
  for (LineSearchKind k : {LineSearchKind::FullStep, LineSearchKind::Bisection, LineSearchKind::BacktrackingResidual,
                           LineSearchKind::BacktrackingEnergy, LineSearchKind::SecantL2, LineSearchKind::SecantEnergy,
                           LineSearchKind::CriticalPoint}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown line search '" + std::string(text) +
                    "' (expected full, bisection, backtracking-residual, backtracking-energy, secant-l2, "
                    "secant-energy or cp)");
}

LineSearchSettings LineSearchSettings::defaults(LineSearchKind kind) {
  LineSearchSettings s;
  s.kind = kind;
  s.max_iter = kind == LineSearchKind::Bisection ? 20 : 10;
  s.mu = kind == LineSearchKind::BacktrackingEnergy ? 1.0 : 1e-4;
  return s;
}

void LineSearchSettings::validate() const {
  std::vector<std::string> problems;
  if (!(atol > 0.0)) problems.emplace_back("atol must be positive");
  if (!(ltol > 0.0 && ltol < 1.0)) problems.emplace_back("ltol must lie in (0, 1)");
  if (!std::isfinite(rtol)) problems.emplace_back("rtol must be finite");
  if (max_iter < 1) problems.emplace_back("max_iter must be >= 1");
  if (!(mu > 0.0)) problems.emplace_back("mu must be positive");
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid line search settings:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

FunctionRay::FunctionRay(std::function<double(double)> energy, std::function<double(double)> slope,
                         double direction_norm, std::function<double(double)> residual_norm_sq)
    : energy_(std::move(energy)),
      slope_(std::move(slope)),
      residual_norm_sq_(std::move(residual_norm_sq)),
      direction_norm_(direction_norm) {}

double FunctionRay::energy(double lambda) {
  ++energy_evals_;
  return energy_(lambda);
}

double FunctionRay::slope(double lambda) {
  ++residual_evals_;
  return slope_(lambda);
}

double FunctionRay::residual_norm_sq(double lambda) {
  ++residual_evals_;
  if (residual_norm_sq_) return residual_norm_sq_(lambda);
  const double s = slope_(lambda);
  return s * s;
}

namespace {

struct EvalCounter {
  RayFunction& ray;
  int r0, e0;
  explicit EvalCounter(RayFunction& r) : ray(r), r0(r.residual_evaluations()), e0(r.energy_evaluations()) {}
  void finish(LineSearchResult& out) const {
    out.residual_evaluations = ray.residual_evaluations() - r0;
    out.energy_evaluations = ray.energy_evaluations() - e0;
  }
};

}  // namespace

LineSearchResult bisection_line_search(RayFunction& ray, const LineSearchSettings& s) {
  EvalCounter counter(ray);
  LineSearchResult out;
  const double s0 = ray.slope(0.0);
  out.initial_slope = s0;
  if (!(s0 < 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "line search direction is not a descent direction: phi'(0) = " << s0;
    throw NotDescentError(os.str(), s0);
  }
  const double s1 = ray.slope(1.0);
  out.final_slope = s1;
  const double norm = ray.direction_norm();
  // A round-off slope at the full step passes the atol exit test as well.
  if (s0 * s1 >= 0.0 || std::abs(s1) / norm <= s.atol) {
    out.lambda = 1.0;
    counter.finish(out);
    return out;
  }

  double left = 0.0, right = 1.0;
  double slope_left = s0;
  double previous = 1.0;
  double lambda = 1.0;
  for (int l = 1; l <= s.max_iter; ++l) {
    lambda = 0.5 * (left + right);
    const double sl = ray.slope(lambda);
    out.steps.push_back({lambda, sl, left, right});
    out.iterations = l;
    out.final_slope = sl;
    const bool small_slope = std::abs(sl) / norm <= s.atol;
    const bool small_ratio = s.rtol > 0.0 && std::abs(sl / s0) <= s.rtol;
    const bool small_step = std::abs(lambda - previous) <= s.ltol;
    if (small_slope || small_ratio || small_step || l == s.max_iter) break;
    if (sl * slope_left < 0.0) {
      right = lambda;
    } else {
      left = lambda;
      slope_left = sl;
    }
    previous = lambda;
  }
  out.lambda = lambda;
  counter.finish(out);
  return out;
}

LineSearchResult backtracking_line_search(RayFunction& ray, BacktrackingObjective objective,
                                          const LineSearchSettings& s) {
  EvalCounter counter(ray);
  LineSearchResult out;
  double phi0 = 0.0, dphi0 = 0.0;
  if (objective == BacktrackingObjective::Energy) {
    phi0 = ray.energy(0.0);
    dphi0 = ray.slope(0.0);
  } else {
    phi0 = 0.5 * ray.residual_norm_sq(0.0);
    dphi0 = ray.residual_objective_slope0();
  }
  out.initial_slope = dphi0;
  auto phi = [&](double lambda) {
    return objective == BacktrackingObjective::Energy ? ray.energy(lambda) : 0.5 * ray.residual_norm_sq(lambda);
  };

  double lambda = 1.0;
  for (int halvings = 0;; ++halvings) {
    const double value = phi(lambda);
    out.steps.push_back({lambda, value, 0.0, 0.0});
    out.iterations = halvings + 1;
    if (value <= phi0 + s.mu * lambda * dphi0) break;
    if (halvings == s.max_iter) {
      out.failed = true;
      break;
    }
    lambda *= 0.5;
  }
  out.lambda = lambda;
  counter.finish(out);
  return out;
}

LineSearchResult secant_line_search(RayFunction& ray, SecantVariant variant, const LineSearchSettings& s) {
  EvalCounter counter(ray);
  LineSearchResult out;
  std::map<double, double> cache;
  auto f = [&](double lambda) {
    auto it = cache.find(lambda);
    if (it != cache.end()) return it->second;
    double v = 0.0;
    switch (variant) {
      case SecantVariant::L2: v = ray.residual_norm_sq(lambda); break;
      case SecantVariant::Energy: v = ray.energy(lambda); break;
      case SecantVariant::CriticalPoint: v = ray.slope(lambda); break;
    }
    cache.emplace(lambda, v);
    return v;
  };
  const double norm = ray.direction_norm();

  double prev = 0.0;
  double lambda = 1.0;
  if (variant == SecantVariant::CriticalPoint) out.initial_slope = f(0.0);
  for (int l = 1; l <= s.max_iter; ++l) {
    const double delta = lambda - prev;
    if (delta == 0.0) break;
    const double mid = 0.5 * (lambda + prev);
    const double f_l = f(lambda);
    const double f_mid = f(mid);
    const double f_prev = f(prev);

    double d1 = 0.0, d2 = 0.0;
    if (variant == SecantVariant::CriticalPoint) {
      d1 = f_l;
      d2 = (3.0 * f_l - 4.0 * f_mid + f_prev) / delta;
      out.final_slope = f_l;
    } else {
      d1 = (3.0 * f_l - 4.0 * f_mid + f_prev) / delta;
      const double d_prev = (-3.0 * f_prev + 4.0 * f_mid - f_l) / delta;
      d2 = (d1 - d_prev) / delta;
    }
    out.steps.push_back({lambda, variant == SecantVariant::CriticalPoint ? f_l : d1, 0.0, 0.0});
    out.iterations = l;
    if (variant == SecantVariant::CriticalPoint && std::abs(f_l) / norm <= s.atol) break;

    double next;
    if (std::abs(d2) < 1e-14 * std::abs(d1) || d2 == 0.0) {
      next = 0.5 * lambda;
      out.fallback = true;
    } else {
      next = lambda - d1 / std::abs(d2);
    }
    if (next > 1.0) next = 1.0;
    if (!(next > 0.0)) next = 0.5 * lambda;
    prev = lambda;
    lambda = next;
    if (std::abs(lambda - prev) <= s.ltol) break;
  }
  out.lambda = lambda;
  counter.finish(out);
  return out;
}

LineSearchResult run_line_search(RayFunction& ray, const LineSearchSettings& s) {
  switch (s.kind) {
    case LineSearchKind::FullStep: return LineSearchResult{};
    case LineSearchKind::Bisection: return bisection_line_search(ray, s);
    case LineSearchKind::BacktrackingResidual:
      return backtracking_line_search(ray, BacktrackingObjective::ResidualSquared, s);
    case LineSearchKind::BacktrackingEnergy: return backtracking_line_search(ray, BacktrackingObjective::Energy, s);
    case LineSearchKind::SecantL2: return secant_line_search(ray, SecantVariant::L2, s);
    case LineSearchKind::SecantEnergy: return secant_line_search(ray, SecantVariant::Energy, s);
    case LineSearchKind::CriticalPoint: return secant_line_search(ray, SecantVariant::CriticalPoint, s);
  }
  throw ConfigError("unsupported line search variant");
}

}  // namespace pff
