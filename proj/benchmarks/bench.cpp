// Microbenchmarks for the hot paths: plain and averaged modulation-RHS
// evaluations, one-step integrators, a small multilevel solve, and the
// scalar fast path.

#include "mlp/averaging.hpp"
#include "mlp/parareal.hpp"
#include "mlp/problems.hpp"
#include "mlp/scalar_engine.hpp"
#include "mlp/spectral.hpp"

#include <benchmark/benchmark.h>

namespace {

void bm_modulation_rhs_three_scale(benchmark::State& state) {
  mlp::ProblemSpec p = mlp::three_scale_problem({2.0, 20.0, 200.0});
  mlp::RhsWorkspace ws;
  ws.nonlin = p.thread_nonlinearity();
  mlp::Vec w = mlp::Vec::Ones(3), out(3);
  double t = 0.3;
  for (auto _ : state) {
    mlp::modulation_rhs(p, t, w, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_modulation_rhs_three_scale);

void bm_averaged_rhs_three_scale(benchmark::State& state) {
  mlp::ProblemSpec p = mlp::three_scale_problem({2.0, 20.0, 200.0});
  int nodes = static_cast<int>(state.range(0));
  mlp::AveragedRhs avg(p, 1.0, nodes, false);
  mlp::RhsWorkspace ws;
  ws.nonlin = p.thread_nonlinearity();
  mlp::Vec w = mlp::Vec::Ones(3), out(3);
  for (auto _ : state) {
    avg.eval(0.3, w, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_averaged_rhs_three_scale)->Arg(32)->Arg(150);

void bm_rswe_rhs(benchmark::State& state) {
  mlp::SpectralGrid grid(static_cast<int>(state.range(0)));
  mlp::RsweParams rp;
  mlp::ProblemSpec p = mlp::build_rswe(rp, grid);
  mlp::RhsWorkspace ws;
  ws.nonlin = p.thread_nonlinearity();
  mlp::Vec w = mlp::rswe_initial_condition(grid), out(w.size());
  for (auto _ : state) {
    mlp::modulation_rhs(p, 1.7, w, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_rswe_rhs)->Arg(32)->Arg(128);

void bm_two_level_oscillatory(benchmark::State& state) {
  mlp::ProblemParams pp;
  pp.r = 100.0;
  mlp::ProblemSpec p = mlp::make_problem(mlp::ProblemId::Oscillatory, pp);
  mlp::MethodConfig cfg;
  cfg.levels = {{1, 1e-2, 0.2, 1, mlp::Integrator::RK2},
                {0, 1e-3, 0.0, 1, mlp::Integrator::RK2}};
  cfg.t_end = 1.0;
  cfg.initial_condition = mlp::default_initial(mlp::ProblemId::Oscillatory, pp);
  for (auto _ : state) {
    mlp::PararealRun run = mlp::solve_multilevel(cfg, p);
    benchmark::DoNotOptimize(run.stats.serial_steps);
  }
}
BENCHMARK(bm_two_level_oscillatory);

void bm_scalar_engine_decay(benchmark::State& state) {
  int L = static_cast<int>(state.range(0));
  std::vector<double> dts(L);
  dts[0] = 0.25;
  for (int i = 1; i < L; ++i) dts[i] = dts[i - 1] / 10.0;
  mlp::ScalarMultilevel eng([](double, mlp::Complex y) { return -y; }, dts,
                            std::vector<int>(L - 1, 1));
  for (auto _ : state) {
    auto nodes = eng.solve(0.0, 2.0, mlp::Complex(1.0, 0.0));
    benchmark::DoNotOptimize(nodes.data());
  }
}
BENCHMARK(bm_scalar_engine_decay)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
