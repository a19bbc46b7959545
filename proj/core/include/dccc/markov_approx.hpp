#pragma once

// Markovian approximations of a confounded exogenous variable: merging its
// children into one product-domain variable, or splitting it into
// independent per-child exogenous variables. Also maps vertices of the merged
// model back to the original semi-Markovian domain.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dccc/canonical.hpp"
#include "dccc/evidence.hpp"
#include "dccc/scm.hpp"
#include "dccc/search.hpp"

namespace dccc {

struct MergeSpec {
  std::string exogenous_id;
  /// Every exogenous variable absorbed by the merge (includes exogenous_id).
  std::vector<std::string> replaced_exogenous;
  std::string merged_exogenous_id;
  std::string merged_id;
  /// Merged endogenous variables in topological order; the merged state is
  /// row-major over them, last fastest.
  std::vector<std::string> members;
  std::vector<int> member_sizes;
  std::vector<std::string> external_parents;
  /// Number of states of the merged endogenous variable.
  int merged_domain_size = 0;
};

/// Fuses the children of `exogenous` (closed under ancestor/descendant
/// chains between them and under shared exogenous parents) into one
/// endogenous variable with a single canonical exogenous parent. Priors of
/// the replaced variables are dropped; the others are kept.
[[nodiscard]] std::pair<PartialScm, MergeSpec> endogenous_merge(const PartialScm& model,
                                                                const std::string& exogenous);

/// Evidence for the merged model: observational tables not touching the
/// members are kept and P~(merged | external parents) is added.
[[nodiscard]] Evidence merge_evidence(const Evidence& evidence, const MergeSpec& spec);

/// Replaces `exogenous` (exactly two children) by `<id>_1` and `<id>_2`,
/// one Markovian canonical parent per child.
[[nodiscard]] PartialScm exogenous_split(const PartialScm& model, const std::string& exogenous);

struct StateMapping {
  std::vector<int> forbidden;
  /// Merged state -> semi-Markovian states with the same observational column.
  std::map<int, std::vector<int>> groups;
};

/// Both domains must be over the same external parents; the merged domain
/// has a single child whose state is the joint of the semi domain's children.
[[nodiscard]] StateMapping build_state_mapping(const CanonicalDomain& semi_domain,
                                               const CanonicalDomain& merged_domain);

/// Spreads each merged vertex over the semi-Markovian domain in every way a
/// group member can be chosen, deduplicating the results. `semi_size` is the
/// size of the semi-Markovian domain.
[[nodiscard]] SolutionSet map_extreme_points(const SolutionSet& merged, const StateMapping& mapping,
                                             const std::string& semi_exogenous_id, std::size_t semi_size);

/// Solves the observational semi-Markovian credal set of `exogenous` through
/// the merged model with forbidden states removed, then maps back.
[[nodiscard]] SolutionSet solve_via_merge(const PartialScm& model, const Evidence& evidence,
                                          const std::string& exogenous, const SearchConfig& config = {});

/// Merged state index of a joint assignment of the members.
[[nodiscard]] int merged_state(const MergeSpec& spec, const std::vector<int>& member_states);

}  // namespace dccc
