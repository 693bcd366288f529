#include <benchmark/benchmark.h>

#include "frsd/digraph.hpp"
#include "frsd/engine.hpp"
#include "frsd/mixing.hpp"
#include "frsd/objectives.hpp"
#include "frsd/protocols.hpp"

namespace {

using namespace frsd;

// One node's FRSD update with a full closed in-neighborhood; args: n, p.
void BM_FrsdStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  const ProblemInstance prob = synth_huber_problem(1, 10, p, 2.0, 1);
  const FrsdState s = frsd_init(0, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)), n);
  std::vector<std::vector<double>> payloads(n, std::vector<double>(p + n, 0.1));
  std::vector<InboxEntry> entries;
  for (NodeId j = 0; j < n; ++j) {
    entries.push_back({j, 1.0 / static_cast<double>(n), 0.0, payloads[j]});
  }
  const Inbox inbox{entries, true, false};
  for (auto _ : state) {
    StepResult r = frsd_step(s, inbox, prob.local(0), {0.01, 5.0});
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_FrsdStep)->Args({10, 15})->Args({25, 301})->Args({200, 15});

// One synchronous round of the simulator; args: algorithm index, n.
void BM_Round(benchmark::State& state) {
  const Algorithm a = all_algorithms()[static_cast<std::size_t>(state.range(0))];
  const auto n = static_cast<std::size_t>(state.range(1));
  SimulationConfig config;
  config.algorithm = a;
  config.graph = generate_strongly_connected(n, 0.1, 1);
  config.problem = synth_huber_problem(n, 10, 15, 2.0, 1);
  config.hp = {1e-3, 0.0};
  Simulator sim(std::move(config));
  for (auto _ : state) sim.advance();
  state.SetLabel(std::string(algorithm_name(a)));
}
BENCHMARK(BM_Round)->ArgsProduct({benchmark::CreateDenseRange(0, 9, 1), {50}});

void BM_StationaryDistribution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MixingMatrix r = build_uniform_row_stochastic(generate_strongly_connected(n, 0.05, 2));
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(r));
}
BENCHMARK(BM_StationaryDistribution)->Arg(50)->Arg(200);

void BM_GenerateGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_strongly_connected(n, 0.015, ++seed));
}
BENCHMARK(BM_GenerateGraph)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
