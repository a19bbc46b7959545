#pragma once

// Vertex enumeration of credal sets by iterating candidate supports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dccc/constraint_system.hpp"
#include "dccc/evidence.hpp"
#include "dccc/scm.hpp"

namespace dccc {

enum class SearchMode { exhaustive, heuristic };

struct Heuristics {
  /// Skip supports leaving some row with positive rhs uncovered.
  bool coverage = false;
  /// Cap how many support columns may cover the rows with the smallest rhs.
  bool low_probability = false;
  int low_probability_rows = 2;
  int low_probability_budget = 1;
};

struct SearchConfig {
  SearchMode mode = SearchMode::exhaustive;
  /// Defaults to the system rank.
  std::optional<int> support_size;
  Heuristics heuristics;
  /// Heuristic mode: skip supports holding two observationally identical columns.
  bool group_pruning = true;
  std::optional<std::size_t> max_solutions;
  /// Only the first `max_supports` supports in colex order are examined.
  std::uint64_t max_supports = 2'000'000'000ULL;
  int threads = 1;
};

struct SearchStats {
  std::uint64_t supports_total = 0;
  std::uint64_t supports_examined = 0;
  std::uint64_t supports_pruned = 0;
  std::uint64_t rank_deficient = 0;
  std::uint64_t inconsistent = 0;
  std::uint64_t negative = 0;
  std::uint64_t feasible = 0;
};

struct SolutionSet {
  std::string exogenous_id;
  /// Deduplicated vertices, sorted lexicographically by probabilities. Dense
  /// over the system's columns.
  std::vector<ExtremePoint> points;
  /// Original exogenous state index of each column.
  std::vector<int> col_labels;
  bool complete = false;
  SearchStats stats;
};

/// Number of k-subsets of n items, saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Tries every support of the configured size.
[[nodiscard]] SolutionSet exhaustive_search(const ConstraintSystem& system, const SearchConfig& config = {});

/// Partition of the columns into classes of identical column vectors, in
/// order of first member.
[[nodiscard]] std::vector<std::vector<int>> group_indistinguishable(const ConstraintSystem& system);

/// Exhaustive search restricted by group pruning and the enabled heuristics.
/// `complete` stays true only when every active filter is exact (group
/// pruning and coverage); the low-probability filter can drop vertices.
[[nodiscard]] SolutionSet pruned_search(const ConstraintSystem& system, const SearchConfig& config);

/// Dispatches on config.mode.
[[nodiscard]] SolutionSet search(const ConstraintSystem& system, const SearchConfig& config);

enum class Regime { markovian, s_o, s_oe, s_e };

[[nodiscard]] Regime parse_regime(const std::string& text);
[[nodiscard]] const char* to_string(Regime regime);

/// Constraint system for one exogenous variable of `model` under a regime.
[[nodiscard]] ConstraintSystem build_system(const PartialScm& model, const Evidence& evidence,
                                            const std::string& exogenous_id, Regime regime);

/// One SolutionSet per exogenous variable, keyed by id.
[[nodiscard]] std::map<std::string, SolutionSet> solve_credal(const PartialScm& model, const Evidence& evidence,
                                                              Regime regime, const SearchConfig& config = {});

/// Dense vector over the original (unreduced) domain of size `full_size`.
[[nodiscard]] std::vector<double> expand_point(const ExtremePoint& point, const std::vector<int>& col_labels,
                                               std::size_t full_size);

}  // namespace dccc
