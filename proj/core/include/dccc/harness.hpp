#pragma once

// Random-instance experiment over the confounded chain X -> Y1 -> Y2 with a
// shared exogenous parent of Y1 and Y2.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dccc/evidence.hpp"
#include "dccc/query.hpp"
#include "dccc/scm.hpp"
#include "dccc/search.hpp"

namespace dccc {

enum class Approach { s_o, s_oe, s_e, mm_o, ms_o };

[[nodiscard]] Approach parse_approach(const std::string& text);
[[nodiscard]] const char* to_string(Approach approach);

/// The chain model without priors: X (U0), Y1 and Y2 (shared U, 16 states).
[[nodiscard]] PartialScm chain_skeleton();

struct Instance {
  PartialScm full;
  Evidence evidence;
};

/// Samples Dirichlet(1) priors for the chain model and derives P~(X),
/// P~(Y1,Y2|X), P~(Y1|do(X)) and P~(Y2|do(Y1)) from it. With `raw_tables`
/// every slice is drawn independently instead, so the evidence may be
/// inconsistent; `full` then has no priors.
[[nodiscard]] Instance generate_instance(std::uint64_t seed, bool raw_tables = false);

/// Seed of instance `index` in an experiment seeded with `seed`.
[[nodiscard]] std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);

/// Model to query and its solution sets under an approach.
struct ApproachSolution {
  PartialScm model;
  std::map<std::string, SolutionSet> solutions;
};

[[nodiscard]] ApproachSolution solve_approach(const PartialScm& skeleton, const Evidence& evidence,
                                              Approach approach, const SearchConfig& config = {});

enum class RowStatus { ok, not_computable, infeasible };

[[nodiscard]] const char* to_string(RowStatus status);

struct ExperimentRow {
  std::size_t model_index = 0;
  Approach approach = Approach::s_o;
  std::string query;
  double lower = 0.0;
  double upper = 0.0;
  double wallclock_ms = 0.0;
  std::size_t n_vertices = 0;
  bool complete = false;
  RowStatus status = RowStatus::ok;
};

struct ExperimentConfig {
  std::size_t n_models = 500;
  std::uint64_t seed = 7;
  std::vector<Approach> approaches{Approach::s_o, Approach::s_oe, Approach::s_e, Approach::mm_o, Approach::ms_o};
  std::vector<Query> queries;
  std::optional<std::filesystem::path> output_dir;
  int threads = 1;
  bool raw_tables = false;
  SearchConfig search;
};

/// Rows of one instance, approach-major then query order.
[[nodiscard]] std::vector<ExperimentRow> run_instance(const Instance& instance, std::size_t model_index,
                                                      const ExperimentConfig& config);

/// Every instance's rows in instance order; writes the CSV files when an
/// output directory is configured.
[[nodiscard]] std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

enum class Containment { equal, a_in_b, b_in_a, none };

/// Relation of [al, au] to [bl, bu] at tolerance 1e-9.
[[nodiscard]] Containment compare_intervals(double al, double au, double bl, double bu);

[[nodiscard]] std::string rows_csv(const std::vector<ExperimentRow>& rows, bool with_wallclock = true);
[[nodiscard]] std::string summary_lengths_csv(const std::vector<ExperimentRow>& rows);
[[nodiscard]] std::string summary_containment_csv(const std::vector<ExperimentRow>& rows);
[[nodiscard]] std::string summary_rmse_csv(const std::vector<ExperimentRow>& rows);
void write_experiment(const std::vector<ExperimentRow>& rows, const std::filesystem::path& dir);

/// Default query list: PNS(X,Y1), PNS(X,Y2), PNS(Y1,Y2).
[[nodiscard]] std::vector<Query> default_queries();

}  // namespace dccc
