#include "pff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pff/assembly.hpp"
#include "pff/line_search.hpp"
#include "pff/material.hpp"
#include "pff/mesh.hpp"

namespace pff {

namespace {

CheckResult make(std::string name, double err, double tol) { return {std::move(name), err, tol, err <= tol}; }

std::vector<MaterialModel> split_models() {
  std::vector<MaterialModel> out;
  for (SplitKind k : {SplitKind::None, SplitKind::VolDev, SplitKind::Spectral, SplitKind::StarConvex,
                      SplitKind::NoTension, SplitKind::DPLike}) {
    MaterialModel m;
    m.split = k;
    if (k == SplitKind::StarConvex) m.gamma_star = 2.0;
    if (k == SplitKind::DPLike) m.gamma_dp = 0.5;
    out.push_back(m);
  }
  return out;
}

SymStrain random_strain(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1e-2, 1e-2);
  return {d(rng), d(rng), d(rng)};
}

// Eigenvalue and trace kinks of the split energies; FD tangents are skipped there.
bool near_branch(const SymStrain& e) {
  const double tr = e.xx + e.yy;
  const double gap = std::hypot(e.xx - e.yy, 2 * e.xy);
  const double size = std::max(std::hypot(e.xx, e.yy, e.xy), 1e-300);
  const double l1 = 0.5 * (tr + gap), l2 = 0.5 * (tr - gap);
  return std::min({std::abs(tr), gap, std::abs(l1), std::abs(l2)}) < 1e-2 * size;
}

double psi_total(const SymStrain& e, const MaterialModel& m) {
  const SplitEval s = evaluate_split(e, m, EvalLevel::Energy);
  return s.psi_D + s.psi_R;
}

// Relative FD comparison of the split stresses against the split energies.
double stress_fd_error(const SymStrain& e, const MaterialModel& m) {
  const SplitEval s = evaluate_split(e, m, EvalLevel::Stress);
  const Voigt v = to_voigt(e);
  double err = 0.0;
  const double scale = std::max(1.0, (s.sigma_D + s.sigma_R).norm());
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-7;
    Voigt p = v, q = v;
    p[i] += h;
    q[i] -= h;
    const SplitEval sp = evaluate_split(from_voigt(p), m, EvalLevel::Energy);
    const SplitEval sq = evaluate_split(from_voigt(q), m, EvalLevel::Energy);
    err = std::max(err, std::abs((sp.psi_D - sq.psi_D) / (2 * h) - s.sigma_D[i]) / scale);
    err = std::max(err, std::abs((sp.psi_R - sq.psi_R) / (2 * h) - s.sigma_R[i]) / scale);
  }
  return err;
}

double tangent_fd_error(const SymStrain& e, const MaterialModel& m) {
  const SplitEval s = evaluate_split(e, m, EvalLevel::Tangent);
  const Voigt v = to_voigt(e);
  const double scale = std::max(1.0, (s.C_D + s.C_R).norm());
  double err = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-6;
    Voigt p = v, q = v;
    p[j] += h;
    q[j] -= h;
    const SplitEval sp = evaluate_split(from_voigt(p), m, EvalLevel::Stress);
    const SplitEval sq = evaluate_split(from_voigt(q), m, EvalLevel::Stress);
    const Voigt dD = (sp.sigma_D - sq.sigma_D) / (2 * h);
    const Voigt dR = (sp.sigma_R - sq.sigma_R) / (2 * h);
    err = std::max(err, (dD - s.C_D.col(j)).cwiseAbs().maxCoeff() / scale);
    err = std::max(err, (dR - s.C_R.col(j)).cwiseAbs().maxCoeff() / scale);
  }
  return err;
}

struct SmallProblem {
  Assembler assembler;
  State state;
};

SmallProblem small_problem(const MaterialModel& m, std::mt19937& rng) {
  const Mesh mesh = build_structured_mesh(3, 3, 1.0, 1.0);
  State s = State::zeros(mesh);
  Constraints c = apply_dirichlet(mesh, s, {});
  std::uniform_real_distribution<double> du(-0.02, 0.02), da(0.1, 0.6);
  for (int i = 0; i < s.u.size(); ++i) s.u[i] = du(rng);
  for (int i = 0; i < s.alpha.size(); ++i) s.alpha[i] = da(rng);
  s.alpha_prev = 0.5 * s.alpha;
  return {Assembler(mesh, m, c), s};
}

double residual_fd_error(const SmallProblem& p) {
  const Eigen::VectorXd Ru = p.assembler.residual_u_full(p.state);
  const Eigen::VectorXd Ra = p.assembler.residual_alpha_full(p.state);
  const double scale = std::max({1e-12, Ru.cwiseAbs().maxCoeff(), Ra.cwiseAbs().maxCoeff()});
  double err = 0.0;
  State s = p.state;
  for (int i = 0; i < s.u.size(); ++i) {
    const double h = 1e-7, x = s.u[i];
    s.u[i] = x + h;
    const double ep = p.assembler.energy(s);
    s.u[i] = x - h;
    const double em = p.assembler.energy(s);
    s.u[i] = x;
    err = std::max(err, std::abs((ep - em) / (2 * h) - Ru[i]) / scale);
  }
  for (int i = 0; i < s.alpha.size(); ++i) {
    const double h = 1e-7, x = s.alpha[i];
    s.alpha[i] = x + h;
    const double ep = p.assembler.energy(s);
    s.alpha[i] = x - h;
    const double em = p.assembler.energy(s);
    s.alpha[i] = x;
    err = std::max(err, std::abs((ep - em) / (2 * h) - Ra[i]) / scale);
  }
  return err;
}

double stiffness_fd_error(const SmallProblem& p) {
  const Eigen::MatrixXd Ku = p.assembler.stiffness_u(p.state).dense();
  const Eigen::MatrixXd Ka = p.assembler.stiffness_alpha(p.state).dense();
  const double scale = std::max({1e-12, Ku.cwiseAbs().maxCoeff(), Ka.cwiseAbs().maxCoeff()});
  double err = 0.0;
  State s = p.state;
  for (int j = 0; j < s.u.size(); ++j) {
    const double h = 1e-6, x = s.u[j];
    s.u[j] = x + h;
    const Eigen::VectorXd rp = p.assembler.residual_u_full(s);
    s.u[j] = x - h;
    const Eigen::VectorXd rm = p.assembler.residual_u_full(s);
    s.u[j] = x;
    err = std::max(err, ((rp - rm) / (2 * h) - Ku.col(j)).cwiseAbs().maxCoeff() / scale);
  }
  for (int j = 0; j < s.alpha.size(); ++j) {
    const double h = 1e-6, x = s.alpha[j];
    s.alpha[j] = x + h;
    const Eigen::VectorXd rp = p.assembler.residual_alpha_full(s);
    s.alpha[j] = x - h;
    const Eigen::VectorXd rm = p.assembler.residual_alpha_full(s);
    s.alpha[j] = x;
    err = std::max(err, ((rp - rm) / (2 * h) - Ka.col(j)).cwiseAbs().maxCoeff() / scale);
  }
  return err;
}

// Quartic ray with a known interior minimizer.
double bisection_error() {
  const double root = 0.3141;
  FunctionRay ray([&](double l) { return std::pow(l - root, 4) + (l - root) * (l - root); },
                  [&](double l) { return 4 * std::pow(l - root, 3) + 2 * (l - root); }, 1.0);
  LineSearchSettings s = LineSearchSettings::defaults(LineSearchKind::Bisection);
  s.max_iter = 40;
  s.ltol = 1e-10;
  return std::abs(bisection_line_search(ray, s).lambda - root);
}

}  // namespace

std::vector<CheckResult> run_self_checks(unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<CheckResult> out;
  for (const MaterialModel& m : split_models()) {
    const std::string tag(to_string(m.split));
    double cons = 0.0, stress = 0.0, tangent = 0.0;
    for (int k = 0; k < 25; ++k) {
      const SymStrain e = random_strain(rng);
      const double p0 = psi0(e, m);
      cons = std::max(cons, std::abs(psi_total(e, m) - p0) / std::max(p0, 1e-300));
      stress = std::max(stress, stress_fd_error(e, m));
      if (!near_branch(e)) tangent = std::max(tangent, tangent_fd_error(e, m));
    }
    out.push_back(make("split " + tag + ": psi_D + psi_R = psi_0", cons, 1e-10));
    out.push_back(make("split " + tag + ": stress vs FD", stress, 1e-6));
    out.push_back(make("split " + tag + ": tangent vs FD", tangent, 1e-5));
  }
  for (SplitKind k : {SplitKind::VolDev, SplitKind::Spectral}) {
    MaterialModel m;
    m.split = k;
    const SmallProblem p = small_problem(m, rng);
    const std::string tag(to_string(k));
    out.push_back(make("assembly " + tag + ": residuals vs FD", residual_fd_error(p), 1e-6));
    out.push_back(make("assembly " + tag + ": stiffness vs FD", stiffness_fd_error(p), 1e-5));
  }
  out.push_back(make("bisection: distance to the ray minimizer", bisection_error(), 1e-9));
  return out;
}

}  // namespace pff
