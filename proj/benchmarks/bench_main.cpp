#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>

#include "chainbk/calibration.hpp"
#include "chainbk/cascade.hpp"
#include "chainbk/game.hpp"
#include "chainbk/netgen.hpp"

using namespace chainbk;

namespace {

SyntheticEconomy economy(std::size_t firms, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.firm_count = firms;
  cfg.seed = seed;
  cfg.mean_out_degree = 1.5;
  cfg.max_customers = 2;
  return generate_economy(cfg);
}

void BM_FitFirm(benchmark::State& state) {
  const auto syn = economy(100, 3);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  // The firm with the most customers in this economy.
  FirmIndex f = 0;
  for (FirmIndex i = 0; i < net.firm_count(); ++i)
    if (net.customers(i).size() > net.customers(f).size()) f = i;
  std::vector<const FirmSeries*> customers;
  for (const auto& c : net.customers(f)) customers.push_back(&panel.firms[c.firm]);
  for (auto _ : state) benchmark::DoNotOptimize(fit_firm(panel.firms[f], customers, panel.gdp));
  state.SetLabel(std::to_string(customers.size()) + " customers");
}
BENCHMARK(BM_FitFirm);

void BM_FitAll(benchmark::State& state) {
  const auto syn = economy(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_all(syn.simulation.panel, syn.economy.network));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitAll)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RunCascade(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.firm_count = static_cast<std::size_t>(state.range(0));
  cfg.seed = 5;
  cfg.horizon = 3;
  cfg.k = {0.2, 1.0};
  cfg.equity_to_revenue = {0.0, 0.05};
  const auto syn = generate_economy(cfg);
  const auto e = economy_at_end(syn.simulation.panel, syn.economy.network, syn.economy.params);
  std::vector<FirmIndex> order(e.size());
  std::iota(order.begin(), order.end(), FirmIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](FirmIndex a, FirmIndex b) {
    return e.network.suppliers(a).size() > e.network.suppliers(b).size();
  });
  CascadeConfig cc;
  for (std::size_t x = 0; x < 10; ++x) cc.trigger_firms.push_back(e.network.id(order[x]));
  for (auto _ : state) benchmark::DoNotOptimize(run_cascade(e, cc));
}
BENCHMARK(BM_RunCascade)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BestResponseGA(benchmark::State& state) {
  PayoffContext c;
  c.state = {120.0, 118.0, 900.0, 40.0, 50.0, false};
  c.params = {0.35, 0.4, 0.2, 0.05, 0.02};
  c.gdp_ratio = 1.01;
  GameConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(best_response_ga(c, cfg, ++seed));
}
BENCHMARK(BM_BestResponseGA)->Unit(benchmark::kMicrosecond);

void BM_BestResponseClosedForm(benchmark::State& state) {
  PayoffContext c;
  c.state = {120.0, 118.0, 900.0, 40.0, 50.0, false};
  c.params = {0.35, 0.4, 0.2, 0.05, 0.02};
  c.gdp_ratio = 1.01;
  GameConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(best_response_closed_form(c, cfg));
}
BENCHMARK(BM_BestResponseClosedForm);

void BM_NashSolve(benchmark::State& state) {
  const auto syn = economy(static_cast<std::size_t>(state.range(0)), 9);
  const auto e = economy_at_end(syn.simulation.panel, syn.economy.network, syn.economy.params);
  GameConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(nash_solve(e, 1.01, cfg));
}
BENCHMARK(BM_NashSolve)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
