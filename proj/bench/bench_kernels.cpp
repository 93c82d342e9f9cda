// Serial reference vs OpenMP kernels. TAB_SIM_THREADS caps the worker count.

#include <benchmark/benchmark.h>

#include <vector>

#include "tab/experiments.hpp"
#include "tab/network.hpp"

namespace {

tab::TabNetwork make_net(int neurons) {
  tab::NeuronParams nominal;
  auto pop = tab::sample_population(static_cast<std::size_t>(neurons), tab::MismatchSpec{},
                                    tab::UniformSpan{0.0, 1.2}, nominal, 1);
  return tab::TabNetwork(std::move(pop), {}, tab::InputMap{}, nominal.bias_current);
}

std::vector<double> grid(int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (n - 1);
  return xs;
}

void BM_HiddenMatrixSerial(benchmark::State& state) {
  const auto net = make_net(static_cast<int>(state.range(1)));
  const auto xs = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tab::build_hidden_matrix_serial(net, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_HiddenMatrixParallel(benchmark::State& state) {
  const auto net = make_net(static_cast<int>(state.range(1)));
  const auto xs = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tab::build_hidden_matrix(net, xs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_ChipsSerial(benchmark::State& state) {
  tab::ExperimentConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(tab::simulate_chips_serial(cfg, static_cast<int>(state.range(0))));
}

void BM_ChipsParallel(benchmark::State& state) {
  tab::ExperimentConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(tab::simulate_chips(cfg, static_cast<int>(state.range(0))));
}

}  // namespace

BENCHMARK(BM_HiddenMatrixSerial)->Args({256, 34})->Args({4096, 200})->Args({16384, 1000});
BENCHMARK(BM_HiddenMatrixParallel)->Args({256, 34})->Args({4096, 200})->Args({16384, 1000});
BENCHMARK(BM_ChipsSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChipsParallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
