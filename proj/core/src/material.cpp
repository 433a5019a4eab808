#include "pff/material.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "pff/errors.hpp"

namespace pff {

std::string_view to_string(Dissipation d) { return d == Dissipation::AT1 ? "AT1" : "AT2"; }

std::string_view to_string(SplitKind s) {
  switch (s) {
    case SplitKind::None: return "none";
    case SplitKind::VolDev: return "voldev";
    case SplitKind::Spectral: return "spectral";
    case SplitKind::StarConvex: return "starconvex";
    case SplitKind::NoTension: return "notension";
    case SplitKind::DPLike: return "dplike";
  }
  return "unknown";
}

Dissipation parse_dissipation(std::string_view text) {
  if (text == "AT1" || text == "at1") return Dissipation::AT1;
  if (text == "AT2" || text == "at2") return Dissipation::AT2;
  throw ConfigError("unknown dissipation model '" + std::string(text) + "' (expected AT1 or AT2)");
}

SplitKind parse_split(std::string_view text) {
  for (SplitKind s : {SplitKind::None, SplitKind::VolDev, SplitKind::Spectral, SplitKind::StarConvex,
                      SplitKind::NoTension, SplitKind::DPLike}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError("unknown split '" + std::string(text) +
                    "' (expected none, voldev, spectral, starconvex, notension or dplike)");
}

void MaterialModel::validate() const {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const char* msg) {
    if (!ok) problems.emplace_back(msg);
  };
  require(std::isfinite(E0) && E0 > 0.0, "E0 must be positive");
  require(std::isfinite(nu0) && nu0 > 0.0 && nu0 < 0.5, "nu0 must lie in (0, 0.5)");
  require(std::isfinite(Gc) && Gc > 0.0, "Gc must be positive");
  require(std::isfinite(ell) && ell > 0.0, "ell must be positive");
  require(std::isfinite(a0) && a0 > 0.0, "a0 must be positive");
  require(std::isfinite(gamma_star) && gamma_star >= -1.0, "gamma_star must be >= -1");
  require(std::isfinite(gamma_dp) && gamma_dp >= 0.0, "gamma_dp must be >= 0");
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid material:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

Voigt to_voigt(const SymStrain& e) { return Voigt(e.xx, e.yy, 2.0 * e.xy); }
SymStrain from_voigt(const Voigt& v) { return {v[0], v[1], 0.5 * v[2]}; }

namespace {

void check_phase_field(double alpha, int order) {
  if (!(alpha >= -1e-12 && alpha <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "phase-field value " << alpha << " outside [0, 1]";
    throw ConfigError(os.str());
  }
  if (order < 0 || order > 2) throw ConfigError("derivative order must be 0, 1 or 2");
}

const VoigtTangent& volumetric_projector() {
  static const VoigtTangent v = (VoigtTangent() << 1, 1, 0, 1, 1, 0, 0, 0, 0).finished();
  return v;
}

// Hessian of |dev eps|^2 / 2 in Voigt form.
const VoigtTangent& deviatoric_projector() {
  static const VoigtTangent d =
      (VoigtTangent() << 4.0 / 3.0, -2.0 / 3.0, 0, -2.0 / 3.0, 4.0 / 3.0, 0, 0, 0, 1.0).finished();
  return d;
}

const Voigt& unit_trace() {
  static const Voigt i(1.0, 1.0, 0.0);
  return i;
}

Voigt deviator_voigt(const SymStrain& e) {
  const SymTensor3 d = deviator(e);
  return Voigt(d.xx, d.yy, d.xy);
}

// Heaviside of the non-negative branch: 0 counts as positive.
double heaviside(double x, Bracket sign) {
  return sign == Bracket::Plus ? (x >= 0.0 ? 1.0 : 0.0) : (x < 0.0 ? 1.0 : 0.0);
}

using Mat2 = Eigen::Matrix2d;

Mat2 as_matrix(const SymTensor3& t) { return (Mat2() << t.xx, t.xy, t.xy, t.yy).finished(); }

// Derivative of eps_{+/-} with respect to the Voigt strain, written as the
// 3x3 map from (d eps_xx, d eps_yy, d gamma_xy) to (d xx, d yy, d xy).
VoigtTangent spectral_part_derivative(const SpectralDecomposition& d, Bracket sign) {
  const Mat2 p1 = as_matrix(d.projectors[0]);
  const Mat2 p2 = as_matrix(d.projectors[1]);
  const double l1 = d.eigenvalues[0];
  const double l2 = d.eigenvalues[1];
  const double h1 = heaviside(l1, sign);
  const double h2 = heaviside(l2, sign);
  const double gap = l1 - l2;
  const double c = gap > 0.0 ? (macaulay(l1, sign) - macaulay(l2, sign)) / gap : h1;

  const std::array<Mat2, 3> unit = {(Mat2() << 1, 0, 0, 0).finished(), (Mat2() << 0, 0, 0, 1).finished(),
                                    (Mat2() << 0, 0.5, 0.5, 0).finished()};
  VoigtTangent t;
  for (int j = 0; j < 3; ++j) {
    const Mat2& de = unit[j];
    const Mat2 a = h1 * (p1.cwiseProduct(de).sum()) * p1 + h2 * (p2.cwiseProduct(de).sum()) * p2 +
                   c * (p1 * de * p2 + p2 * de * p1);
    t(0, j) = a(0, 0);
    t(1, j) = a(1, 1);
    t(2, j) = a(0, 1);
  }
  return t;
}

SplitEval eval_none(const SymStrain& e, const MaterialModel& m, EvalLevel level) {
  SplitEval r;
  r.psi_D = psi0(e, m);
  if (level == EvalLevel::Energy) return r;
  r.sigma_D = sigma0(e, m);
  if (level == EvalLevel::Stress) return r;
  r.C_D = tangent0(m);
  return r;
}

// Star-convex family; gamma = 0 is the volumetric-deviatoric split and
// gamma = -1 the undecomposed model.
SplitEval eval_star_convex(const SymStrain& e, const MaterialModel& m, double gamma, EvalLevel level) {
  SplitEval r;
  const double mu = m.mu();
  const double kappa = m.kappa();
  const double tr = trace(e);
  const double tp = macaulay(tr, Bracket::Plus);
  const double tm = macaulay(tr, Bracket::Minus);
  r.psi_D = mu * norm_sq(deviator(e)) + 0.5 * kappa * (tp * tp - gamma * tm * tm);
  r.psi_R = (1.0 + gamma) * 0.5 * kappa * tm * tm;
  if (level == EvalLevel::Energy) return r;
  r.sigma_D = 2.0 * mu * deviator_voigt(e) + kappa * (tp - gamma * tm) * unit_trace();
  r.sigma_R = (1.0 + gamma) * kappa * tm * unit_trace();
  if (level == EvalLevel::Stress) return r;
  const double hp = heaviside(tr, Bracket::Plus);
  const double hm = heaviside(tr, Bracket::Minus);
  r.C_D = mu * deviatoric_projector() + kappa * (hp - gamma * hm) * volumetric_projector();
  r.C_R = (1.0 + gamma) * kappa * hm * volumetric_projector();
  return r;
}

SplitEval eval_spectral(const SymStrain& e, const MaterialModel& m, EvalLevel level) {
  SplitEval r;
  const double mu = m.mu();
  const double lam = m.lambda();
  const double tr = trace(e);
  const double tp = macaulay(tr, Bracket::Plus);
  const double tm = macaulay(tr, Bracket::Minus);
  const SpectralDecomposition d = spectral_decompose(e);
  double sum_p = 0.0, sum_m = 0.0;
  SymStrain ep, em;
  for (int i = 0; i < 2; ++i) {
    const double vp = macaulay(d.eigenvalues[i], Bracket::Plus);
    const double vm = macaulay(d.eigenvalues[i], Bracket::Minus);
    sum_p += vp * vp;
    sum_m += vm * vm;
    ep = ep + vp * SymStrain{d.projectors[i].xx, d.projectors[i].yy, d.projectors[i].xy};
    em = em + vm * SymStrain{d.projectors[i].xx, d.projectors[i].yy, d.projectors[i].xy};
  }
  r.psi_D = 0.5 * lam * tp * tp + mu * sum_p;
  r.psi_R = 0.5 * lam * tm * tm + mu * sum_m;
  if (level == EvalLevel::Energy) return r;
  r.sigma_D = lam * tp * unit_trace() + 2.0 * mu * Voigt(ep.xx, ep.yy, ep.xy);
  r.sigma_R = lam * tm * unit_trace() + 2.0 * mu * Voigt(em.xx, em.yy, em.xy);
  if (level == EvalLevel::Stress) return r;
  r.C_D = lam * heaviside(tr, Bracket::Plus) * volumetric_projector() +
          2.0 * mu * spectral_part_derivative(d, Bracket::Plus);
  r.C_R = lam * heaviside(tr, Bracket::Minus) * volumetric_projector() +
          2.0 * mu * spectral_part_derivative(d, Bracket::Minus);
  return r;
}

// psi_0 of a full 3D (xz = yz = 0) tensor.
double psi0_3d(const SymTensor3& t, const MaterialModel& m) {
  const double tr = trace(t);
  return 0.5 * m.lambda() * tr * tr + m.mu() * norm_sq(t);
}

Voigt sigma0_3d_inplane(const SymTensor3& t, const MaterialModel& m) {
  const double tr = trace(t);
  return m.lambda() * tr * unit_trace() + 2.0 * m.mu() * Voigt(t.xx, t.yy, t.xy);
}

std::string describe(const SymStrain& e) {
  std::ostringstream os;
  os.precision(17);
  os << "(xx=" << e.xx << ", yy=" << e.yy << ", xy=" << e.xy << ")";
  return os.str();
}

// No-tension cone (eta positive semidefinite) in the eigenbasis of eps:
// min lam/2 (s - sum eta)^2 + mu sum (eps_i - eta_i)^2 subject to eta_i >= 0.
// The 8 candidate active sets are enumerated and the KKT point kept.
std::array<double, 3> no_tension_eta(const std::array<double, 3>& eps, const MaterialModel& m, const SymStrain& e) {
  const double lam = m.lambda();
  const double mu = m.mu();
  const double s = eps[0] + eps[1] + eps[2];
  const double scale = (lam + 2.0 * mu) * (1.0 + std::abs(eps[0]) + std::abs(eps[1]) + std::abs(eps[2]));
  const double tol = 1e-12 * scale;
  double best_violation = std::numeric_limits<double>::infinity();
  std::array<double, 3> best{};
  for (int mask = 0; mask < 8; ++mask) {
    int k = 0;
    double sum_eps = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (mask & (1 << i)) {
        ++k;
        sum_eps += eps[i];
      }
    }
    const double ratio = lam / (2.0 * mu);
    const double total = (sum_eps + k * ratio * s) / (1.0 + k * ratio);
    std::array<double, 3> eta{};
    for (int i = 0; i < 3; ++i) {
      if (mask & (1 << i)) eta[i] = eps[i] + ratio * (s - total);
    }
    double violation = 0.0;
    const double eta_sum = eta[0] + eta[1] + eta[2];
    for (int i = 0; i < 3; ++i) {
      if (mask & (1 << i)) {
        violation = std::max(violation, -eta[i] * (lam + 2.0 * mu));
      } else {
        const double g = -lam * (s - eta_sum) - 2.0 * mu * eps[i];
        violation = std::max(violation, -g);
      }
    }
    if (violation < best_violation) {
      best_violation = violation;
      best = eta;
    }
  }
  if (best_violation > tol) {
    throw ConeSplitError("no-tension inner minimization did not reach stationarity for strain " + describe(e));
  }
  for (double& v : best) v = std::max(v, 0.0);
  return best;
}

}  // namespace

double degradation(double alpha, int order, double a0) {
  check_phase_field(alpha, order);
  return detail::degradation(alpha, order, a0);
}

double dissipation(double alpha, Dissipation model, int order) {
  check_phase_field(alpha, order);
  return detail::dissipation(alpha, model, order);
}

double psi0(const SymStrain& e, const MaterialModel& m) {
  const double tr = trace(e);
  return 0.5 * m.kappa() * tr * tr + m.mu() * norm_sq(deviator(e));
}

Voigt sigma0(const SymStrain& e, const MaterialModel& m) {
  return m.kappa() * trace(e) * unit_trace() + 2.0 * m.mu() * deviator_voigt(e);
}

VoigtTangent tangent0(const MaterialModel& m) {
  return m.kappa() * volumetric_projector() + m.mu() * deviatoric_projector();
}

SymTensor3 cone_optimal_eta(const SymStrain& e, const MaterialModel& m) {
  if (m.split == SplitKind::NoTension) {
    const SpectralDecomposition d = spectral_decompose(e);
    const auto eta = no_tension_eta(d.eigenvalues, m, e);
    SymTensor3 out;
    for (int i = 0; i < 3; ++i) out = out + eta[i] * d.projectors[i];
    return out;
  }
  if (m.split != SplitKind::DPLike) throw ConfigError("cone_optimal_eta requires the notension or dplike split");

  // DP-like cone tr(eta) >= gamma |dev eta|. The optimal eta is coaxial with
  // eps and its deviator is parallel to dev eps, which leaves a problem in
  // (t, r) = (tr eta, |dev eta|) with constraint t >= gamma r.
  const double kappa = m.kappa();
  const double mu = m.mu();
  const double gamma = m.gamma_dp;
  const double s = trace(e);
  const SymTensor3 dev = deviator(e);
  const double q = std::sqrt(norm_sq(dev));
  if (s >= gamma * q) return embed(e);
  const double r = (kappa * gamma * s + 2.0 * mu * q) / (kappa * gamma * gamma + 2.0 * mu);
  if (r <= 0.0 || q == 0.0) return SymTensor3{};
  const double t = gamma * r;
  const SymTensor3 iso{t / 3.0, t / 3.0, t / 3.0, 0.0};
  return iso + (r / q) * dev;
}

SplitEval cone_split(const SymStrain& e, const MaterialModel& m, EvalLevel level) {
  if (m.split != SplitKind::NoTension && m.split != SplitKind::DPLike) {
    throw ConfigError("cone_split requires the notension or dplike split");
  }
  auto stresses = [&m](const SymStrain& strain, SplitEval& out) {
    const SymTensor3 eta = cone_optimal_eta(strain, m);
    const SymTensor3 elastic = embed(strain) + (-1.0) * eta;
    out.psi_R = psi0_3d(elastic, m);
    out.psi_D = psi0(strain, m) - out.psi_R;
    out.sigma_R = sigma0_3d_inplane(elastic, m);
    out.sigma_D = sigma0(strain, m) - out.sigma_R;
  };

  SplitEval r;
  stresses(e, r);
  if (level != EvalLevel::Tangent) return r;

  const Voigt v = to_voigt(e);
  const double h = 1e-7 * (1.0 + v.norm());
  for (int j = 0; j < 3; ++j) {
    Voigt vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    SplitEval plus, minus;
    stresses(from_voigt(vp), plus);
    stresses(from_voigt(vm), minus);
    r.C_D.col(j) = (plus.sigma_D - minus.sigma_D) / (2.0 * h);
    r.C_R.col(j) = (plus.sigma_R - minus.sigma_R) / (2.0 * h);
  }
  // symmetrize
  r.C_D = 0.5 * (r.C_D + r.C_D.transpose()).eval();
  r.C_R = 0.5 * (r.C_R + r.C_R.transpose()).eval();
  return r;
}

SplitEval evaluate_split(const SymStrain& e, const MaterialModel& m, EvalLevel level) {
  switch (m.split) {
    case SplitKind::None: return eval_none(e, m, level);
    case SplitKind::VolDev: return eval_star_convex(e, m, 0.0, level);
    case SplitKind::StarConvex: return eval_star_convex(e, m, m.gamma_star, level);
    case SplitKind::Spectral: return eval_spectral(e, m, level);
    case SplitKind::NoTension:
    case SplitKind::DPLike: return cone_split(e, m, level);
  }
  throw ConfigError("unsupported split variant");
}

}  // namespace pff
