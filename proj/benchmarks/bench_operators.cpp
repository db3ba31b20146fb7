#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "dynamo/frame_calculus.hpp"
#include "dynamo/induction.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

dynamo::DynamoScenario scenario(std::size_t n_z, double eta) {
  dynamo::DynamoScenario s;
  s.metric = dynamo::FrameMetric(0.962423650119206895);
  s.grid = dynamo::GridSpec{32, 32, n_z, 0.0, 1.0};
  s.flow_speed = 1.0;
  s.resistivity = eta;
  s.initial = [](double p, double q, double z) {
    return std::array<double, 3>{std::sin(kTwoPi * (q + z)), std::cos(kTwoPi * (p + z)), 0.0};
  };
  s.dt = dynamo::stable_time_step(s.metric, s.grid, s.flow_speed, eta);
  return s;
}

void BM_InductionRhsIdeal(benchmark::State& state) {
  const auto s = scenario(static_cast<std::size_t>(state.range(0)), 0.0);
  const dynamo::InductionOperator op(s);
  const auto b = s.initial_field();
  for (auto _ : state) benchmark::DoNotOptimize(op.rhs(b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.size()));
}
BENCHMARK(BM_InductionRhsIdeal)->Arg(128)->Arg(256);

void BM_InductionRhsResistive(benchmark::State& state) {
  const auto s = scenario(static_cast<std::size_t>(state.range(0)), 1e-3);
  const dynamo::InductionOperator op(s);
  const auto b = s.initial_field();
  for (auto _ : state) benchmark::DoNotOptimize(op.rhs(b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grid.size()));
}
BENCHMARK(BM_InductionRhsResistive)->Arg(128);

void BM_Divergence(benchmark::State& state) {
  const auto s = scenario(128, 0.0);
  const dynamo::FrameOperators ops(s.metric, s.grid);
  const auto b = s.initial_field();
  for (auto _ : state) benchmark::DoNotOptimize(ops.div(b));
}
BENCHMARK(BM_Divergence);

void BM_VectorLaplacian(benchmark::State& state) {
  const auto s = scenario(128, 0.0);
  const dynamo::FrameOperators ops(s.metric, s.grid);
  const auto b = s.initial_field();
  for (auto _ : state) benchmark::DoNotOptimize(ops.vector_laplacian(b));
}
BENCHMARK(BM_VectorLaplacian);

}  // namespace
BENCHMARK_MAIN();
