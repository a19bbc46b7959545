#pragma once

// Empirical conditional tables: P~(targets | given) for observational data and
// P~(targets | do(given)) for experimental data.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dccc/scm.hpp"

namespace dccc {

/// Flat conditional table. Axis order is `given` (outer, row-major) followed
/// by `targets` (inner, row-major); the last-listed variable varies fastest.
struct ConditionalTable {
  std::vector<std::string> targets;
  std::vector<std::string> given;
  std::vector<int> target_sizes;
  std::vector<int> given_sizes;
  std::vector<double> values;

  [[nodiscard]] std::size_t target_configurations() const { return joint_size(target_sizes); }
  [[nodiscard]] std::size_t given_configurations() const { return joint_size(given_sizes); }

  [[nodiscard]] double at(std::size_t given_config, std::size_t target_config) const {
    return values[given_config * target_configurations() + target_config];
  }
  /// Probability of the assignment restricted to this table's variables.
  [[nodiscard]] double probability(const std::map<std::string, int>& assignment) const;
  /// Same set of targets and of given variables, in any order.
  [[nodiscard]] bool matches(std::span<const std::string> targets,
                             std::span<const std::string> given) const;
  /// Throws EvidenceError unless entries are nonnegative and every slice
  /// sums to 1 within 1e-9.
  void validate() const;
};

struct Evidence {
  std::vector<ConditionalTable> observational;
  std::vector<ConditionalTable> experimental;

  [[nodiscard]] const ConditionalTable* find_observational(std::span<const std::string> targets,
                                                           std::span<const std::string> given) const;
  [[nodiscard]] const ConditionalTable* find_experimental(std::span<const std::string> targets,
                                                          std::span<const std::string> intervened) const;
  void validate() const;
  /// Checks variable names and axis sizes against a model.
  void check_against(const PartialScm& model) const;
};

/// P(targets | given) of a fully specified model.
[[nodiscard]] ConditionalTable observational_table(const PartialScm& model,
                                                   std::span<const std::string> targets,
                                                   std::span<const std::string> given);
/// P(targets | do(intervened)) of a fully specified model.
[[nodiscard]] ConditionalTable experimental_table(const PartialScm& model,
                                                  std::span<const std::string> targets,
                                                  std::span<const std::string> intervened);

/// Derives P~(targets | given) from the observational tables by chaining them
/// into a joint (e.g. P~(X) and P~(Y1,Y2|X)) and conditioning. Throws
/// EvidenceError when the tables do not cover the request or a conditioning
/// slice has zero mass.
[[nodiscard]] ConditionalTable derive_conditional(const Evidence& evidence,
                                                  std::span<const std::string> targets,
                                                  std::span<const std::string> given);

}  // namespace dccc
