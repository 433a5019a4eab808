#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "pff/errors.hpp"
#include "pff/material.hpp"

using namespace pff;

namespace {

// Lame form of the undamaged energy, independent of the kappa/deviator path.
double psi0_lame(const SymStrain& e, const MaterialModel& m) {
  const double tr = e.xx + e.yy;
  return 0.5 * m.lambda() * tr * tr + m.mu() * (e.xx * e.xx + e.yy * e.yy + 2 * e.xy * e.xy);
}

SymStrain random_strain(std::mt19937& rng, double scale = 1e-2) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng), d(rng)};
}

MaterialModel with_split(SplitKind k, double gamma_star = 0.0, double gamma_dp = 0.0) {
  MaterialModel m;
  m.split = k;
  m.gamma_star = gamma_star;
  m.gamma_dp = gamma_dp;
  return m;
}

std::vector<MaterialModel> all_splits() {
  return {with_split(SplitKind::None),          with_split(SplitKind::VolDev),
          with_split(SplitKind::Spectral),      with_split(SplitKind::StarConvex, -1.0),
          with_split(SplitKind::StarConvex, 1), with_split(SplitKind::StarConvex, 5),
          with_split(SplitKind::NoTension),     with_split(SplitKind::DPLike, 0.0, 0.0),
          with_split(SplitKind::DPLike, 0, 0.7)};
}

bool near_branch(const SymStrain& e) {
  const double tr = e.xx + e.yy;
  const double gap = std::sqrt((e.xx - e.yy) * (e.xx - e.yy) + 4 * e.xy * e.xy);
  const double mean = 0.5 * tr;
  const double l1 = mean + 0.5 * gap, l2 = mean - 0.5 * gap;
  return std::abs(tr) < 1e-3 || gap < 1e-3 || std::abs(l1) < 1e-3 || std::abs(l2) < 1e-3;
}

}  // namespace

TEST(MaterialModel, DerivedModuli) {
  MaterialModel m;
  EXPECT_NEAR(m.mu(), 100.0 / 2.6, 1e-12);
  EXPECT_NEAR(m.lambda(), 100.0 * 0.3 / (1.3 * 0.4), 1e-12);
  EXPECT_NEAR(m.kappa(), m.lambda() + 2 * m.mu() / 3, 1e-12);
  EXPECT_DOUBLE_EQ(m.cw(), 8.0 / 3.0);
  m.dissipation = Dissipation::AT2;
  EXPECT_DOUBLE_EQ(m.cw(), 2.0);
}

TEST(MaterialModel, ValidateListsEveryProblem) {
  MaterialModel m;
  m.E0 = -1;
  m.nu0 = 0.7;
  m.gamma_star = -2;
  try {
    m.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("E0"), std::string::npos);
    EXPECT_NE(what.find("nu0"), std::string::npos);
    EXPECT_NE(what.find("gamma_star"), std::string::npos);
  }
}

TEST(MaterialModel, NameRoundTrip) {
  for (auto k : {SplitKind::None, SplitKind::VolDev, SplitKind::Spectral, SplitKind::StarConvex, SplitKind::NoTension,
                 SplitKind::DPLike}) {
    EXPECT_EQ(parse_split(to_string(k)), k);
  }
  EXPECT_EQ(parse_dissipation("AT2"), Dissipation::AT2);
  EXPECT_THROW(parse_split("miehe"), ConfigError);
}

TEST(Degradation, Values) {
  EXPECT_DOUBLE_EQ(degradation(0.0, 0), 1.0 + 1e-6);
  EXPECT_DOUBLE_EQ(degradation(1.0, 0), 1e-6);
  EXPECT_DOUBLE_EQ(degradation(0.5, 0), 0.25 + 1e-6);
  EXPECT_DOUBLE_EQ(degradation(0.25, 1), -1.5);
  EXPECT_DOUBLE_EQ(degradation(0.25, 2), 2.0);
  EXPECT_NO_THROW(degradation(1.0 + 5e-13, 0));
  EXPECT_THROW(degradation(-1e-9, 0), ConfigError);
  EXPECT_THROW(degradation(1.1, 0), ConfigError);
  EXPECT_THROW(degradation(0.5, 3), ConfigError);
}

TEST(Dissipation, Values) {
  EXPECT_DOUBLE_EQ(dissipation(0.0, Dissipation::AT1, 0), 0.0);
  EXPECT_DOUBLE_EQ(dissipation(1.0, Dissipation::AT1, 0), 1.0);
  EXPECT_DOUBLE_EQ(dissipation(0.7, Dissipation::AT1, 1), 1.0);
  EXPECT_DOUBLE_EQ(dissipation(0.7, Dissipation::AT1, 2), 0.0);
  EXPECT_DOUBLE_EQ(dissipation(0.5, Dissipation::AT2, 0), 0.25);
  EXPECT_DOUBLE_EQ(dissipation(0.3, Dissipation::AT2, 1), 0.6);
  EXPECT_DOUBLE_EQ(dissipation(0.3, Dissipation::AT2, 2), 2.0);
  EXPECT_THROW(dissipation(2.0, Dissipation::AT2, 0), ConfigError);
}

TEST(Split, VolDevHydrostaticCompression) {
  const MaterialModel m = with_split(SplitKind::VolDev);
  const SplitEval s = evaluate_split({-1.0, -1.0, 0.0}, m);
  // tr = -2, dev = (-1/3, -1/3, 2/3)
  EXPECT_NEAR(s.psi_R, 0.5 * m.kappa() * 4.0, 1e-12);
  EXPECT_NEAR(s.psi_D, m.mu() * 2.0 / 3.0, 1e-12);
}

TEST(Split, VolDevHydrostaticTension) {
  const MaterialModel m = with_split(SplitKind::VolDev);
  const SplitEval s = evaluate_split({1.0, 1.0, 0.0}, m);
  EXPECT_NEAR(s.psi_R, 0.0, 1e-15);
  EXPECT_NEAR(s.psi_D, 2 * m.kappa() + 2 * m.mu() / 3, 1e-12);
}

TEST(Split, SumEqualsUndamagedEnergy) {
  std::mt19937 rng(10);
  for (const auto& m : all_splits()) {
    for (int k = 0; k < 1000; ++k) {
      const SymStrain e = random_strain(rng);
      const SplitEval s = evaluate_split(e, m, EvalLevel::Stress);
      const double p0 = psi0_lame(e, m);
      EXPECT_LE(std::abs(s.psi_D + s.psi_R - p0), 1e-12 * p0) << to_string(m.split);
      const Voigt total = s.sigma_D + s.sigma_R;
      const Voigt ref(m.lambda() * (e.xx + e.yy) + 2 * m.mu() * e.xx, m.lambda() * (e.xx + e.yy) + 2 * m.mu() * e.yy,
                      2 * m.mu() * e.xy);
      EXPECT_LE((total - ref).norm(), 1e-12 * ref.norm() + 1e-300) << to_string(m.split);
    }
  }
}

TEST(Split, StarConvexLimits) {
  std::mt19937 rng(11);
  const MaterialModel vd = with_split(SplitKind::VolDev), sc0 = with_split(SplitKind::StarConvex, 0.0),
                      scm1 = with_split(SplitKind::StarConvex, -1.0);
  for (int k = 0; k < 1000; ++k) {
    const SymStrain e = random_strain(rng);
    const SplitEval a = evaluate_split(e, vd, EvalLevel::Energy), b = evaluate_split(e, sc0, EvalLevel::Energy);
    EXPECT_EQ(a.psi_D, b.psi_D);
    EXPECT_EQ(a.psi_R, b.psi_R);
    const SplitEval c = evaluate_split(e, scm1, EvalLevel::Energy);
    EXPECT_NEAR(c.psi_D, psi0_lame(e, scm1), 1e-12 * psi0_lame(e, scm1));
    EXPECT_NEAR(c.psi_R, 0.0, 1e-18);
  }
}

TEST(Split, HomogeneousOfDegreeTwo) {
  std::mt19937 rng(12);
  for (const auto& m : all_splits()) {
    for (int k = 0; k < 200; ++k) {
      const SymStrain e = random_strain(rng);
      const SplitEval a = evaluate_split(e, m, EvalLevel::Energy);
      for (double s : {0.5, 2.0, 10.0}) {
        const SplitEval b = evaluate_split(s * e, m, EvalLevel::Energy);
        const double scale = s * s * (a.psi_D + a.psi_R);
        EXPECT_NEAR(b.psi_D, s * s * a.psi_D, 1e-11 * scale) << to_string(m.split);
        EXPECT_NEAR(b.psi_R, s * s * a.psi_R, 1e-11 * scale) << to_string(m.split);
      }
    }
  }
}

TEST(Split, StressMatchesEnergyDifferences) {
  std::mt19937 rng(13);
  for (const auto& m : all_splits()) {
    for (int k = 0; k < 200; ++k) {
      const SymStrain e = random_strain(rng, 1.0);
      const SplitEval s = evaluate_split(e, m, EvalLevel::Stress);
      const Voigt v = to_voigt(e);
      const double h = 1e-6 * (1.0 + v.norm());
      const double scale = (s.sigma_D + s.sigma_R).norm();
      for (int i = 0; i < 3; ++i) {
        Voigt p = v, q = v;
        p[i] += h;
        q[i] -= h;
        const SplitEval sp = evaluate_split(from_voigt(p), m, EvalLevel::Energy);
        const SplitEval sq = evaluate_split(from_voigt(q), m, EvalLevel::Energy);
        EXPECT_LE(std::abs((sp.psi_D - sq.psi_D) / (2 * h) - s.sigma_D[i]), 1e-6 * scale) << to_string(m.split);
        EXPECT_LE(std::abs((sp.psi_R - sq.psi_R) / (2 * h) - s.sigma_R[i]), 1e-6 * scale) << to_string(m.split);
      }
    }
  }
}

TEST(Split, TangentMatchesStressDifferences) {
  std::mt19937 rng(14);
  for (const auto& m : all_splits()) {
    if (m.split == SplitKind::NoTension || m.split == SplitKind::DPLike) continue;
    int checked = 0;
    while (checked < 200) {
      const SymStrain e = random_strain(rng, 1.0);
      if (near_branch(e)) continue;
      ++checked;
      const SplitEval s = evaluate_split(e, m);
      const Voigt v = to_voigt(e);
      const double h = 1e-6 * (1.0 + v.norm());
      const double scale = (s.C_D + s.C_R).norm();
      for (int j = 0; j < 3; ++j) {
        Voigt p = v, q = v;
        p[j] += h;
        q[j] -= h;
        const SplitEval sp = evaluate_split(from_voigt(p), m, EvalLevel::Stress);
        const SplitEval sq = evaluate_split(from_voigt(q), m, EvalLevel::Stress);
        EXPECT_LE(((sp.sigma_D - sq.sigma_D) / (2 * h) - s.C_D.col(j)).norm(), 1e-5 * scale) << to_string(m.split);
        EXPECT_LE(((sp.sigma_R - sq.sigma_R) / (2 * h) - s.C_R.col(j)).norm(), 1e-5 * scale) << to_string(m.split);
      }
    }
  }
}

TEST(Split, TangentsAreSymmetric) {
  std::mt19937 rng(15);
  for (const auto& m : all_splits()) {
    for (int k = 0; k < 50; ++k) {
      const SplitEval s = evaluate_split(random_strain(rng), m);
      EXPECT_LE((s.C_D - s.C_D.transpose()).norm(), 1e-10 * (1.0 + s.C_D.norm()));
      EXPECT_LE((s.C_R - s.C_R.transpose()).norm(), 1e-10 * (1.0 + s.C_R.norm()));
    }
  }
}

TEST(Split, DegradedTangentPositiveDefinite) {
  std::mt19937 rng(16);
  std::uniform_real_distribution<double> da(0.0, 1.0);
  for (const auto& m : {with_split(SplitKind::None), with_split(SplitKind::VolDev), with_split(SplitKind::Spectral),
                        with_split(SplitKind::StarConvex, -1.0), with_split(SplitKind::StarConvex, -0.5)}) {
    for (int k = 0; k < 500; ++k) {
      const SplitEval s = evaluate_split(random_strain(rng), m);
      const double a = degradation(da(rng), 0);
      const Eigen::Matrix3d C = a * s.C_D + s.C_R;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(C);
      EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0) << to_string(m.split);
    }
  }
}

TEST(ConeSplit, NoTensionPositiveSemidefiniteStrain) {
  const MaterialModel m = with_split(SplitKind::NoTension);
  const SymStrain e{0.02, 0.01, 0.005};
  const SymTensor3 eta = cone_optimal_eta(e, m);
  EXPECT_NEAR(eta.xx, e.xx, 1e-15);
  EXPECT_NEAR(eta.yy, e.yy, 1e-15);
  EXPECT_NEAR(eta.xy, e.xy, 1e-15);
  EXPECT_NEAR(eta.zz, 0.0, 1e-15);
  EXPECT_NEAR(evaluate_split(e, m).psi_R, 0.0, 1e-15);
}

TEST(ConeSplit, NoTensionNegativeDefiniteStrain) {
  const MaterialModel m = with_split(SplitKind::NoTension);
  const SymStrain e{-0.02, -0.01, 0.003};
  const SymTensor3 eta = cone_optimal_eta(e, m);
  EXPECT_EQ(norm_sq(eta), 0.0);
  EXPECT_NEAR(evaluate_split(e, m).psi_R, psi0_lame(e, m), 1e-15);
  // stationarity: sigma0(eps) : eta <= 0 for every eta >= 0, i.e. sigma0 is
  // negative semidefinite (3D, including the zz entry lambda tr)
  const double tr = e.xx + e.yy;
  Eigen::Matrix3d sig;
  sig << m.lambda() * tr + 2 * m.mu() * e.xx, 2 * m.mu() * e.xy, 0, 2 * m.mu() * e.xy,
      m.lambda() * tr + 2 * m.mu() * e.yy, 0, 0, 0, m.lambda() * tr;
  std::mt19937 rng(17);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d v(n(rng), n(rng), n(rng));
    EXPECT_LE(v.dot(sig * v), 0.0);
  }
}

TEST(ConeSplit, NoTensionOptimalityAgainstSampling) {
  const MaterialModel m = with_split(SplitKind::NoTension);
  std::mt19937 rng(18);
  std::normal_distribution<double> n(0.0, 0.01);
  const double lam = m.lambda(), mu = m.mu();
  auto energy = [&](const Eigen::Matrix3d& el) {
    return 0.5 * lam * el.trace() * el.trace() + mu * el.squaredNorm();
  };
  for (int k = 0; k < 50; ++k) {
    const SymStrain e = random_strain(rng);
    const double psiR = evaluate_split(e, m, EvalLevel::Energy).psi_R;
    Eigen::Matrix3d E;
    E << e.xx, e.xy, 0, e.xy, e.yy, 0, 0, 0, 0;
    for (int j = 0; j < 300; ++j) {
      Eigen::Matrix3d B;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) B(a, b) = n(rng);
      const Eigen::Matrix3d eta = B * B.transpose();  // positive semidefinite
      EXPECT_GE(energy(E - eta), psiR - 1e-14);
    }
  }
}

TEST(ConeSplit, DPLikeHydrostaticTension) {
  const MaterialModel m = with_split(SplitKind::DPLike, 0.0, 0.0);
  const SplitEval s = evaluate_split({0.01, 0.01, 0.0}, m);
  EXPECT_NEAR(s.psi_R, 0.0, 1e-15);
}

TEST(ConeSplit, DPLikeMatchesGridSearch) {
  // brute force over coaxial eta = diag(a, b, c) in the eigenbasis of eps
  for (double gamma : {0.0, 0.7}) {
    const MaterialModel m = with_split(SplitKind::DPLike, 0.0, gamma);
    const double lam = m.lambda(), mu = m.mu();
    for (const SymStrain e : {SymStrain{-0.01, 0.004, 0.0}, SymStrain{0.003, -0.008, 0.0}, SymStrain{-0.005, -0.006, 0.0}}) {
      const double psiR = evaluate_split(e, m, EvalLevel::Energy).psi_R;
      // coarse grid, then zoomed grids around the incumbent
      double best = 1e300, ca = 0.0, cb = 0.0, cc = 0.0, half = 0.012;
      const int N = 40;
      for (int level = 0; level < 7; ++level) {
        const double a0 = ca, b0 = cb, c0 = cc;
        for (int i = 0; i <= N; ++i)
          for (int j = 0; j <= N; ++j)
            for (int k = 0; k <= N; ++k) {
              const double a = a0 - half + 2 * half * i / N, b = b0 - half + 2 * half * j / N,
                           c = c0 - half + 2 * half * k / N;
              const double t = a + b + c;
              const double d1 = a - t / 3, d2 = b - t / 3, d3 = c - t / 3;
              if (t < gamma * std::sqrt(d1 * d1 + d2 * d2 + d3 * d3)) continue;
              const double x = e.xx - a, y = e.yy - b, z = -c;
              const double tr = x + y + z;
              const double val = 0.5 * lam * tr * tr + mu * (x * x + y * y + z * z);
              if (val < best) {
                best = val;
                ca = a;
                cb = b;
                cc = c;
              }
            }
        half *= 4.0 / N;
      }
      EXPECT_LE(psiR, best + 1e-12);
      EXPECT_NEAR(psiR, best, 1e-5 * psi0_lame(e, m));
    }
  }
}

TEST(ConeSplit, OptimalEtaLiesInCone) {
  std::mt19937 rng(19);
  const MaterialModel nt = with_split(SplitKind::NoTension), dp = with_split(SplitKind::DPLike, 0.0, 0.7);
  for (int k = 0; k < 500; ++k) {
    const SymStrain e = random_strain(rng);
    const SymTensor3 a = cone_optimal_eta(e, nt);
    Eigen::Matrix3d A;
    A << a.xx, a.xy, 0, a.xy, a.yy, 0, 0, 0, a.zz;
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(A).eigenvalues().minCoeff(), -1e-15);
    const SymTensor3 b = cone_optimal_eta(e, dp);
    const double t = trace(b);
    const SymTensor3 dev = b + SymTensor3{-t / 3, -t / 3, -t / 3, 0.0};
    EXPECT_GE(t - 0.7 * std::sqrt(norm_sq(dev)), -1e-14);
  }
}

TEST(ConeSplit, RejectsOtherSplits) {
  EXPECT_THROW(cone_split({0.01, 0.0, 0.0}, with_split(SplitKind::VolDev)), ConfigError);
}
