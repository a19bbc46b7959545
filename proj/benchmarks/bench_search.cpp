#include <benchmark/benchmark.h>

#include "dccc/constraint_system.hpp"
#include "dccc/harness.hpp"
#include "dccc/oracle.hpp"
#include "dccc/query.hpp"
#include "dccc/search.hpp"

namespace {

using namespace dccc;

const Instance& instance() {
  static const Instance inst = generate_instance(instance_seed(7, 0));
  return inst;
}

ConstraintSystem system_for(Regime regime) { return build_system(chain_skeleton(), instance().evidence, "U", regime); }

void BM_Exhaustive(benchmark::State& state) {
  const auto regime = static_cast<Regime>(state.range(0));
  const auto system = system_for(regime);
  std::uint64_t supports = 0;
  for (auto _ : state) {
    auto set = exhaustive_search(system);
    supports = set.stats.supports_examined;
    benchmark::DoNotOptimize(set);
  }
  state.SetLabel(to_string(regime));
  state.counters["supports"] = static_cast<double>(supports);
}
BENCHMARK(BM_Exhaustive)
    ->Arg(static_cast<int>(Regime::s_o))
    ->Arg(static_cast<int>(Regime::s_oe))
    ->Arg(static_cast<int>(Regime::s_e))
    ->Unit(benchmark::kMillisecond);

void BM_CoveragePruned(benchmark::State& state) {
  const auto system = system_for(Regime::s_o);
  SearchConfig config;
  config.mode = SearchMode::heuristic;
  config.heuristics.coverage = true;
  for (auto _ : state) benchmark::DoNotOptimize(search(system, config));
}
BENCHMARK(BM_CoveragePruned)->Unit(benchmark::kMillisecond);

void BM_ExactRank(benchmark::State& state) {
  const auto system = system_for(Regime::s_oe);
  for (auto _ : state) benchmark::DoNotOptimize(exact_rank(system));
}
BENCHMARK(BM_ExactRank);

void BM_BoundQuery(benchmark::State& state) {
  const auto skeleton = chain_skeleton();
  const auto sets = solve_credal(skeleton, instance().evidence, Regime::s_o);
  const auto query = Query::parse("pns:X:Y2");
  for (auto _ : state) benchmark::DoNotOptimize(bound_query(sets, skeleton, query));
}
BENCHMARK(BM_BoundQuery)->Unit(benchmark::kMicrosecond);

void BM_LpBound(benchmark::State& state) {
  const auto skeleton = chain_skeleton();
  const auto sets = solve_credal(skeleton, instance().evidence, Regime::s_o);
  const auto system = system_for(Regime::s_o);
  const std::map<std::string, SolutionSet> others{{"U0", sets.at("U0")}};
  const auto f = query_functional(skeleton, Query::parse("pns:X:Y2"), system, others);
  for (auto _ : state) benchmark::DoNotOptimize(lp_bound(system, f, Sense::maximize));
}
BENCHMARK(BM_LpBound)->Unit(benchmark::kMicrosecond);

void BM_HarnessInstance(benchmark::State& state) {
  ExperimentConfig config;
  config.queries = default_queries();
  for (auto _ : state) benchmark::DoNotOptimize(run_instance(instance(), 0, config));
}
BENCHMARK(BM_HarnessInstance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
