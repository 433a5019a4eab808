#include <benchmark/benchmark.h>

#include <random>

#include "pff/assembly.hpp"
#include "pff/cases.hpp"
#include "pff/line_search.hpp"
#include "pff/linear_solver.hpp"
#include "pff/material.hpp"

namespace {

pff::SplitKind split_arg(int i) {
  static constexpr pff::SplitKind kinds[] = {pff::SplitKind::None, pff::SplitKind::VolDev, pff::SplitKind::Spectral,
                                             pff::SplitKind::NoTension};
  return kinds[i];
}

struct Fixture {
  pff::BenchmarkCase c;
  pff::State state;
  pff::Assembler assembler;

  Fixture(int n, pff::SplitKind split)
      : c(make(n, split)), state(c.initial_state()), assembler(c.mesh, c.material, constraints(c, state)) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> du(-1e-3, 1e-3), da(0.0, 0.5);
    for (int i = 0; i < state.u.size(); ++i) state.u[i] += du(rng);
    for (int i = 0; i < state.alpha.size(); ++i) state.alpha[i] = da(rng);
  }
  static pff::BenchmarkCase make(int n, pff::SplitKind split) {
    pff::MaterialModel m;
    m.split = split;
    return pff::make_nucleation_case(m, n, n, pff::LoadProgram{});
  }
  static pff::Constraints constraints(const pff::BenchmarkCase& c, pff::State& s) {
    return pff::apply_dirichlet(c.mesh, s, c.dirichlet_at(0.5));
  }
};

void BM_ResidualU(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), split_arg(static_cast<int>(st.range(1))));
  for (auto _ : st) benchmark::DoNotOptimize(f.assembler.residual_u(f.state));
  st.SetLabel(std::string(pff::to_string(split_arg(static_cast<int>(st.range(1))))));
}
BENCHMARK(BM_ResidualU)->ArgsProduct({{25, 50}, {0, 1, 2, 3}})->Unit(benchmark::kMillisecond);

void BM_StiffnessU(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), split_arg(static_cast<int>(st.range(1))));
  for (auto _ : st) benchmark::DoNotOptimize(f.assembler.stiffness_u(f.state));
  st.SetLabel(std::string(pff::to_string(split_arg(static_cast<int>(st.range(1))))));
}
BENCHMARK(BM_StiffnessU)->ArgsProduct({{25, 50}, {0, 1, 2, 3}})->Unit(benchmark::kMillisecond);

void BM_StiffnessAlpha(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), pff::SplitKind::VolDev);
  for (auto _ : st) benchmark::DoNotOptimize(f.assembler.stiffness_alpha(f.state));
}
BENCHMARK(BM_StiffnessAlpha)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Energy(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), pff::SplitKind::Spectral);
  for (auto _ : st) benchmark::DoNotOptimize(f.assembler.energy(f.state));
}
BENCHMARK(BM_Energy)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SolveSpd(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)), pff::SplitKind::VolDev);
  const pff::SparseSymMatrix K = f.assembler.stiffness_u(f.state);
  const Eigen::VectorXd b = f.assembler.residual_u(f.state);
  for (auto _ : st) benchmark::DoNotOptimize(pff::solve_spd(K, b));
}
BENCHMARK(BM_SolveSpd)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_BisectionScalar(benchmark::State& st) {
  pff::FunctionRay ray([](double l) { return (l - 0.3) * (l - 0.3) * (1 + l * l); },
                       [](double l) { return 2 * (l - 0.3) * (1 + l * l) + 2 * l * (l - 0.3) * (l - 0.3); }, 1.0);
  const auto s = pff::LineSearchSettings::defaults(pff::LineSearchKind::Bisection);
  for (auto _ : st) benchmark::DoNotOptimize(pff::bisection_line_search(ray, s));
}
BENCHMARK(BM_BisectionScalar);

}  // namespace
BENCHMARK_MAIN();
