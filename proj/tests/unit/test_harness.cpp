#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include "dccc/error.hpp"
#include "dccc/harness.hpp"
#include "dccc/io.hpp"

using namespace dccc;

namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

ExperimentConfig small_config(std::size_t n) {
  ExperimentConfig c;
  c.n_models = n;
  c.seed = 99;
  c.queries = default_queries();
  return c;
}

}  // namespace

TEST_CASE("instances are seeded deterministically and are consistent") {
  const auto a = generate_instance(42);
  const auto b = generate_instance(42);
  const auto c = generate_instance(43);
  CHECK(dump_evidence(a.evidence) == dump_evidence(b.evidence));
  CHECK(dump_evidence(a.evidence) != dump_evidence(c.evidence));
  CHECK_NOTHROW(a.evidence.validate());
  CHECK(a.full.fully_specified());
  // The generating prior is itself a feasible point of every exact regime.
  const auto& prior = a.full.priors().at("U");
  for (const auto regime : {Regime::s_o, Regime::s_oe, Regime::s_e})
    CHECK(build_system(chain_skeleton(), a.evidence, "U", regime).residual(prior) <= 1e-9);
  CHECK(instance_seed(7, 0) != instance_seed(7, 1));
}

TEST_CASE("raw tables are valid slices without a generating model") {
  const auto raw = generate_instance(5, true);
  CHECK_NOTHROW(raw.evidence.validate());
  CHECK_FALSE(raw.full.fully_specified());
  CHECK(raw.evidence.experimental.size() == 2);
}

TEST_CASE("approach names round-trip") {
  for (const auto a : {Approach::s_o, Approach::s_oe, Approach::s_e, Approach::mm_o, Approach::ms_o})
    CHECK(parse_approach(to_string(a)) == a);
  CHECK_THROWS_AS((void)parse_approach("xx"), Error);
}

TEST_CASE("interval comparison") {
  CHECK(compare_intervals(0.1, 0.2, 0.1, 0.2) == Containment::equal);
  CHECK(compare_intervals(0.1, 0.2, 0.1 + 1e-12, 0.2) == Containment::equal);
  CHECK(compare_intervals(0.15, 0.2, 0.1, 0.2) == Containment::a_in_b);
  CHECK(compare_intervals(0.0, 0.3, 0.1, 0.2) == Containment::b_in_a);
  CHECK(compare_intervals(0.0, 0.15, 0.1, 0.2) == Containment::none);
}

TEST_CASE("experiment rows and CSV layout") {
  const auto rows = run_experiment(small_config(4));
  CHECK(rows.size() == 4 * 5 * 3);
  std::size_t not_computable = 0;
  for (const auto& r : rows) {
    if (r.status == RowStatus::not_computable) {
      ++not_computable;
      CHECK(r.approach == Approach::mm_o);
      CHECK(r.query == "pns:Y1:Y2");
    } else {
      CHECK(r.status == RowStatus::ok);
      CHECK(r.upper >= r.lower);
    }
  }
  CHECK(not_computable == 4);

  CHECK(first_line(rows_csv(rows)) ==
        "model_index,regime,query,lower,upper,length,wallclock_ms,n_vertices,complete,status");
  CHECK(first_line(rows_csv(rows, false)) == "model_index,regime,query,lower,upper,length,n_vertices,complete,status");
  CHECK(first_line(summary_lengths_csv(rows)) == "regime,query,n,mean_length,mean_lower,mean_upper");
  CHECK(first_line(summary_containment_csv(rows)) ==
        "a,b,query,n,equal_pct,a_strictly_in_b_pct,b_strictly_in_a_pct,incomparable_pct,a_not_in_b_pct");
  const auto rmse = summary_rmse_csv(rows);
  CHECK(first_line(rmse).rfind("# rmse", 0) == 0);
  CHECK(rmse.find("mm-o,pns:Y1:Y2") == std::string::npos);
  CHECK(rmse.find("ms-o,pns:Y1:Y2") != std::string::npos);
}

TEST_CASE("experiments are reproducible across reruns and thread counts") {
  auto config = small_config(6);
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  config.threads = 3;
  const auto c = run_experiment(config);
  CHECK(rows_csv(a, false) == rows_csv(b, false));
  CHECK(rows_csv(a, false) == rows_csv(c, false));
  CHECK(summary_containment_csv(a) == summary_containment_csv(c));
}

TEST_CASE("experiment writes the four CSV files") {
  auto config = small_config(2);
  const auto dir = std::filesystem::temp_directory_path() / "dccc_harness_test";
  std::filesystem::remove_all(dir);
  config.output_dir = dir;
  (void)run_experiment(config);
  for (const char* name : {"rows.csv", "summary_lengths.csv", "summary_containment.csv", "summary_rmse.csv"})
    CHECK(std::filesystem::exists(dir / name));
  std::filesystem::remove_all(dir);
}

TEST_CASE("raw-table experiments record failures instead of stopping") {
  auto config = small_config(8);
  config.raw_tables = true;
  const auto rows = run_experiment(config);
  CHECK(rows.size() == 8 * 5 * 3);
  std::set<RowStatus> seen;
  for (const auto& r : rows) seen.insert(r.status);
  CHECK(seen.count(RowStatus::ok) == 1);
}

TEST_CASE("experiment config is validated") {
  auto config = small_config(0);
  CHECK_THROWS_AS((void)run_experiment(config), Error);
  config = small_config(1);
  config.queries.clear();
  CHECK_THROWS_AS((void)run_experiment(config), Error);
}
