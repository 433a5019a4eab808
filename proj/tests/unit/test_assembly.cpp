#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pff/assembly.hpp"
#include "pff/cases.hpp"
#include "pff/errors.hpp"
#include "pff/linear_solver.hpp"

using namespace pff;

namespace {

MaterialModel split(SplitKind k, double gamma_star = 0.0) {
  MaterialModel m;
  m.split = k;
  m.gamma_star = gamma_star;
  return m;
}

struct Problem {
  Mesh mesh;
  Constraints constraints;
  State state;
};

Problem unconstrained(int n) {
  Problem s{build_structured_mesh(n, n, 1.0, 1.0), {}, {}};
  s.state = State::zeros(s.mesh);
  s.constraints = apply_dirichlet(s.mesh, s.state, {});
  return s;
}

void randomize(State& s, std::mt19937& rng) {
  std::uniform_real_distribution<double> du(-0.05, 0.05), da(0.0, 1.0);
  for (int i = 0; i < s.u.size(); ++i) s.u[i] = du(rng);
  for (int i = 0; i < s.alpha.size(); ++i) {
    s.alpha[i] = da(rng);
    s.alpha_prev[i] = s.alpha[i] * da(rng);
  }
}

double psi0_lame(double exx, double eyy, double exy, const MaterialModel& m) {
  const double tr = exx + eyy;
  return 0.5 * m.lambda() * tr * tr + m.mu() * (exx * exx + eyy * eyy + 2 * exy * exy);
}

// Max relative deviation of the assembled residuals from central differences
// of the energy, step 1e-6 (1 + |z|_inf).
double residual_fd(const Assembler& a, const State& s0, const PenaltySettings* pen) {
  const Eigen::VectorXd Ru = a.residual_u_full(s0);
  const Eigen::VectorXd Ra = a.residual_alpha_full(s0, pen);
  const double zinf = std::max(s0.u.cwiseAbs().maxCoeff(), s0.alpha.cwiseAbs().maxCoeff());
  const double h = 1e-6 * (1.0 + zinf);
  const double scale = std::max(Ru.cwiseAbs().maxCoeff(), Ra.cwiseAbs().maxCoeff());
  State s = s0;
  double err = 0.0;
  for (int i = 0; i < s.u.size(); ++i) {
    const double x = s.u[i];
    s.u[i] = x + h;
    const double ep = a.energy(s, pen);
    s.u[i] = x - h;
    const double em = a.energy(s, pen);
    s.u[i] = x;
    err = std::max(err, std::abs((ep - em) / (2 * h) - Ru[i]) / scale);
  }
  for (int i = 0; i < s.alpha.size(); ++i) {
    const double x = s.alpha[i];
    s.alpha[i] = x + h;
    const double ep = a.energy(s, pen);
    s.alpha[i] = x - h;
    const double em = a.energy(s, pen);
    s.alpha[i] = x;
    err = std::max(err, std::abs((ep - em) / (2 * h) - Ra[i]) / scale);
  }
  return err;
}

double stiffness_fd(const Assembler& a, const State& s0, const PenaltySettings* pen) {
  const Eigen::MatrixXd Ku = a.stiffness_u(s0).dense();
  const Eigen::MatrixXd Ka = a.stiffness_alpha(s0, pen).dense();
  const double h = 1e-6 * (1.0 + s0.u.cwiseAbs().maxCoeff());
  double err_u = 0.0, err_a = 0.0;
  State s = s0;
  for (int j = 0; j < s.u.size(); ++j) {
    const double x = s.u[j];
    s.u[j] = x + h;
    const Eigen::VectorXd rp = a.residual_u_full(s);
    s.u[j] = x - h;
    const Eigen::VectorXd rm = a.residual_u_full(s);
    s.u[j] = x;
    err_u = std::max(err_u, ((rp - rm) / (2 * h) - Ku.col(j)).cwiseAbs().maxCoeff());
  }
  const double ha = 1e-6;
  for (int j = 0; j < s.alpha.size(); ++j) {
    const double x = s.alpha[j];
    s.alpha[j] = x + ha;
    const Eigen::VectorXd rp = a.residual_alpha_full(s, pen);
    s.alpha[j] = x - ha;
    const Eigen::VectorXd rm = a.residual_alpha_full(s, pen);
    s.alpha[j] = x;
    err_a = std::max(err_a, ((rp - rm) / (2 * ha) - Ka.col(j)).cwiseAbs().maxCoeff());
  }
  return std::max(err_u / Ku.cwiseAbs().maxCoeff(), err_a / Ka.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(Assembly, QuadratureArea) {
  for (int n : {1, 3, 8, 17}) {
    const Problem s = unconstrained(n);
    const Assembler a(s.mesh, MaterialModel{}, s.constraints);
    EXPECT_NEAR(a.area(), 1.0, 1e-13);
  }
}

TEST(Assembly, ZeroStateHasZeroEnergy) {
  const Problem s = unconstrained(4);
  const Assembler a(s.mesh, MaterialModel{}, s.constraints);
  EXPECT_EQ(a.energy(s.state), 0.0);
}

TEST(Assembly, UniformStrainEnergy) {
  Problem s = unconstrained(6);
  const MaterialModel m = split(SplitKind::None);
  const double exx = 0.01, eyy = -0.004, exy = 0.003;
  for (int n = 0; n < s.mesh.num_nodes(); ++n) {
    const auto [x, y] = s.mesh.nodes[n];
    s.state.u[2 * n] = exx * x + exy * y;
    s.state.u[2 * n + 1] = exy * x + eyy * y;
  }
  const Assembler a(s.mesh, m, s.constraints);
  const double expected = (1.0 + m.a0) * psi0_lame(exx, eyy, exy, m);
  EXPECT_NEAR(a.energy(s.state), expected, 1e-12 * expected);
}

TEST(Assembly, UniformDamageEnergy) {
  Problem s = unconstrained(5);
  MaterialModel m;
  s.state.alpha.setConstant(0.3);
  const Assembler a(s.mesh, m, s.constraints);
  const double expected = 3.0 * m.Gc / 8.0 * 0.3 / m.ell;
  EXPECT_NEAR(a.energy(s.state), expected, 1e-12 * expected);
  m.dissipation = Dissipation::AT2;
  const Assembler b(s.mesh, m, s.constraints);
  EXPECT_NEAR(b.energy(s.state), m.Gc / 2.0 * 0.09 / m.ell, 1e-14);
}

TEST(Assembly, ResidualsMatchEnergyDifferences) {
  std::mt19937 rng(21);
  for (const auto& m : {split(SplitKind::None), split(SplitKind::VolDev), split(SplitKind::Spectral),
                        split(SplitKind::StarConvex, 1.0), split(SplitKind::NoTension)}) {
    Problem s = unconstrained(8);
    const Assembler a(s.mesh, m, s.constraints);
    for (int k = 0; k < 3; ++k) {
      randomize(s.state, rng);
      EXPECT_LE(residual_fd(a, s.state, nullptr), 1e-6) << to_string(m.split);
    }
  }
}

TEST(Assembly, PenalizedResidualsMatchEnergyDifferences) {
  std::mt19937 rng(22);
  Problem s = unconstrained(6);
  const Assembler a(s.mesh, MaterialModel{}, s.constraints);
  PenaltySettings p;
  p.tol_ir = 1e-2;  // milder epsilon keeps the FD well conditioned
  randomize(s.state, rng);
  s.state.alpha_prev = s.state.alpha + 0.05 * Eigen::VectorXd::Ones(s.state.alpha.size());
  EXPECT_LE(residual_fd(a, s.state, &p), 1e-6);
  EXPECT_LE(stiffness_fd(a, s.state, &p), 1e-5);
}

TEST(Assembly, StiffnessMatchesResidualDifferences) {
  std::mt19937 rng(23);
  for (const auto& m : {split(SplitKind::None), split(SplitKind::VolDev), split(SplitKind::Spectral),
                        split(SplitKind::StarConvex, 5.0)}) {
    Problem s = unconstrained(8);
    const Assembler a(s.mesh, m, s.constraints);
    for (int k = 0; k < 3; ++k) {
      randomize(s.state, rng);
      EXPECT_LE(stiffness_fd(a, s.state, nullptr), 1e-5) << to_string(m.split);
    }
  }
}

TEST(Assembly, TaylorRemainderIsSecondOrder) {
  std::mt19937 rng(24);
  Problem s = unconstrained(6);
  const Assembler a(s.mesh, split(SplitKind::None), s.constraints);
  randomize(s.state, rng);
  State dir = s.state;
  randomize(dir, rng);
  const Eigen::VectorXd Ru = a.residual_u_full(s.state), Ra = a.residual_alpha_full(s.state);
  const SparseSymMatrix Ku = a.stiffness_u(s.state), Ka = a.stiffness_alpha(s.state);
  const double E0 = a.energy(s.state);
  // the coupling block is not assembled, so vary u and alpha separately
  std::vector<double> ratios_u, ratios_a;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    State t = s.state;
    t.u += eps * dir.u;
    const double ru = a.energy(t) - E0 - eps * dir.u.dot(Ru) - 0.5 * eps * eps * dir.u.dot(Ku.multiply(dir.u));
    ratios_u.push_back(std::abs(ru) / (eps * eps));
    t = s.state;
    t.alpha += eps * dir.alpha;
    const double ra =
        a.energy(t) - E0 - eps * dir.alpha.dot(Ra) - 0.5 * eps * eps * dir.alpha.dot(Ka.multiply(dir.alpha));
    ratios_a.push_back(std::abs(ra) / (eps * eps));
  }
  EXPECT_LT(ratios_u[2], 0.2 * ratios_u[0] + 1e-6);
  EXPECT_LT(ratios_a[2], 1e-6);  // exactly quadratic in alpha
}

TEST(Assembly, DamageStiffnessIndependentOfDamage) {
  std::mt19937 rng(25);
  Problem s = unconstrained(6);
  const Assembler a(s.mesh, split(SplitKind::Spectral), s.constraints);
  randomize(s.state, rng);
  State t = s.state;
  randomize(t, rng);
  t.u = s.state.u;
  const SparseSymMatrix K1 = a.stiffness_alpha(s.state), K2 = a.stiffness_alpha(t);
  ASSERT_EQ(K1.nonzeros(), K2.nonzeros());
  for (long i = 0; i < K1.nonzeros(); ++i) EXPECT_EQ(K1.values()[i], K2.values()[i]);
}

TEST(Assembly, DamageResidualIsAffine) {
  std::mt19937 rng(26);
  Problem s = unconstrained(6);
  const Assembler a(s.mesh, split(SplitKind::VolDev), s.constraints);
  for (int k = 0; k < 5; ++k) {
    randomize(s.state, rng);
    State zero = s.state;
    zero.alpha.setZero();
    const Eigen::VectorXd lhs = a.residual_alpha(s.state);
    const Eigen::VectorXd rhs = a.stiffness_alpha(s.state).multiply(s.state.alpha) + a.residual_alpha(zero);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * lhs.norm());
  }
}

TEST(Assembly, PenaltyVanishesAtPreviousDamage) {
  std::mt19937 rng(27);
  Problem s = unconstrained(5);
  const Assembler a(s.mesh, MaterialModel{}, s.constraints);
  randomize(s.state, rng);
  s.state.alpha_prev = s.state.alpha;
  const PenaltySettings p;
  EXPECT_EQ(a.residual_alpha(s.state, &p), a.residual_alpha(s.state));
  EXPECT_EQ(a.energy(s.state, &p), a.energy(s.state));
  EXPECT_NEAR(p.epsilon(MaterialModel{}), 0.1 / 0.05 * 27.0 / (64.0 * 1e-8), 1e-3);
}

TEST(Assembly, NoSplitDisplacementStiffnessIndependentOfDisplacement) {
  std::mt19937 rng(28);
  Problem s = unconstrained(5);
  const Assembler a(s.mesh, split(SplitKind::None), s.constraints);
  randomize(s.state, rng);
  State t = s.state;
  t.u *= -3.0;
  const SparseSymMatrix K1 = a.stiffness_u(s.state), K2 = a.stiffness_u(t);
  for (long i = 0; i < K1.nonzeros(); ++i) EXPECT_EQ(K1.values()[i], K2.values()[i]);
}

TEST(Assembly, StiffnessBlocksArePositiveDefinite) {
  std::mt19937 rng(29);
  for (const auto& m : {split(SplitKind::None), split(SplitKind::VolDev), split(SplitKind::Spectral),
                        split(SplitKind::StarConvex, -1.0), split(SplitKind::StarConvex, -0.5)}) {
    Problem s{build_structured_mesh(6, 6, 1, 1), {}, {}};
    s.state = State::zeros(s.mesh);
    s.constraints = apply_dirichlet(s.mesh, s.state, {{"bottom", Field::Ux, 0.0}, {"bottom", Field::Uy, 0.0}});
    const Assembler a(s.mesh, m, s.constraints);
    randomize(s.state, rng);
    LinearSolver solver;
    EXPECT_NO_THROW(solver.factorize(a.stiffness_u(s.state))) << to_string(m.split);
    EXPECT_NO_THROW(solver.factorize(a.stiffness_alpha(s.state))) << to_string(m.split);
  }
}

TEST(Assembly, Deterministic) {
  std::mt19937 rng(30);
  Problem s = unconstrained(20);
  const Assembler a(s.mesh, split(SplitKind::Spectral), s.constraints);
  randomize(s.state, rng);
  EXPECT_EQ(a.energy(s.state), a.energy(s.state));
  EXPECT_EQ(a.residual_u(s.state), a.residual_u(s.state));
  const SparseSymMatrix K1 = a.stiffness_u(s.state), K2 = a.stiffness_u(s.state);
  for (long i = 0; i < K1.nonzeros(); ++i) ASSERT_EQ(K1.values()[i], K2.values()[i]);
}

TEST(Assembly, NonFiniteStateRaisesAssemblyError) {
  Problem s = unconstrained(3);
  const Assembler a(s.mesh, MaterialModel{}, s.constraints);
  s.state.u[5] = std::nan("");
  EXPECT_THROW(a.residual_u(s.state), AssemblyError);
  EXPECT_THROW(a.energy(s.state), AssemblyError);
}

TEST(Dirichlet, PinnedBoundaryLeavesInteriorUnknowns) {
  const Mesh mesh = build_structured_mesh(5, 4, 1, 1);
  State st = State::zeros(mesh);
  std::vector<DirichletCondition> bcs;
  for (const char* set : {"left", "right", "bottom", "top"}) {
    bcs.push_back({set, Field::Ux, 0.0});
    bcs.push_back({set, Field::Uy, 0.0});
    bcs.push_back({set, Field::Alpha, 0.0});
  }
  const Constraints c = apply_dirichlet(mesh, st, bcs);
  EXPECT_EQ(c.u.num_free(), 2 * 4 * 3);
  EXPECT_EQ(c.alpha.num_free(), 4 * 3);
  EXPECT_THROW(apply_dirichlet(mesh, st, {{"nowhere", Field::Ux, 0.0}}), ConfigError);
}

TEST(Dirichlet, RestrictScatterRoundTrip) {
  const Mesh mesh = build_structured_mesh(3, 3, 1, 1);
  State st = State::zeros(mesh);
  const Constraints c = apply_dirichlet(mesh, st, {{"left", Field::Ux, 0.5}});
  Eigen::VectorXd full = Eigen::VectorXd::LinSpaced(st.u.size(), 0.0, 1.0);
  const Eigen::VectorXd free = c.u.restrict(full);
  Eigen::VectorXd back = Eigen::VectorXd::Zero(full.size());
  c.u.scatter(free, back);
  for (int i = 0; i < full.size(); ++i) EXPECT_EQ(back[i], c.u.full_to_free[i] < 0 ? 0.0 : full[i]);
  for (int n : mesh.node_set("left")) EXPECT_EQ(st.u[2 * n], 0.5);
}

TEST(Dirichlet, NucleationBoundaryConditionsGiveHomogeneousStrain) {
  MaterialModel m;
  m.split = SplitKind::None;
  const BenchmarkCase c = make_nucleation_case(m, 7, 7, LoadProgram{});
  State st = c.initial_state();
  const Constraints cons = apply_dirichlet(c.mesh, st, c.dirichlet_at(1.0));
  const Assembler a(c.mesh, m, cons);
  const Eigen::VectorXd R = a.residual_u(st);
  Eigen::VectorXd w = cons.u.restrict(st.u) - solve_spd(a.stiffness_u(st), R);
  cons.u.scatter(w, st.u);
  EXPECT_LE(a.residual_u(st).norm(), 1e-10 * R.norm());

  const double pi = std::acos(-1.0);
  const double ubx = std::cos(320.0 * pi / 180.0) * 0.1, uby = std::sin(320.0 * pi / 180.0) * 0.1;
  for (int n = 0; n < c.mesh.num_nodes(); ++n) {
    const auto [x, y] = c.mesh.nodes[n];
    EXPECT_NEAR(st.u[2 * n], ubx * (2 * x - 1), 1e-10 * std::abs(ubx));
    EXPECT_NEAR(st.u[2 * n + 1], uby * (2 * y - 1), 1e-10 * std::abs(uby));
  }
  const double left = a.reaction(st, "left", Field::Ux), right = a.reaction(st, "right", Field::Ux);
  EXPECT_NEAR(left, -right, 1e-10 * std::abs(left));
  // uniaxial-strain reactions: sigma_xx * L on each edge
  const double exx = 2 * ubx, eyy = 2 * uby;
  const double sxx = (1 + m.a0) * (m.lambda() * (exx + eyy) + 2 * m.mu() * exx);
  EXPECT_NEAR(right, sxx, 1e-9 * std::abs(sxx));
}
