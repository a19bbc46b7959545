#pragma once

// Canonical exogenous domains: every exogenous state indexes one combination
// of deterministic mechanisms for the exogenous variable's children.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dccc/scm.hpp"

namespace dccc {

/// A mechanism maps joint endogenous-parent configurations to child states.
using Mechanism = std::vector<int>;

struct CanonicalDomain {
  std::string exogenous_id;
  /// Children in topological order.
  std::vector<std::string> children;
  std::vector<int> child_sizes;
  /// Endogenous parents of each child (may include earlier children).
  std::vector<std::vector<std::string>> parents;
  std::vector<std::vector<int>> parent_sizes;
  /// functions[state][child] is that child's mechanism under the state.
  std::vector<std::vector<Mechanism>> functions;
  /// Original state index of each state (identity for freshly built domains).
  std::vector<int> labels;

  [[nodiscard]] std::size_t size() const { return functions.size(); }

  /// Endogenous parents that are not themselves children, in first-seen order.
  [[nodiscard]] std::vector<std::string> external_parents() const;
  [[nodiscard]] std::vector<int> external_sizes() const;
  [[nodiscard]] int external_configurations() const;

  /// Joint child states produced by `state` when the external parents take
  /// configuration `external_config`. Children are solved in order.
  [[nodiscard]] std::vector<int> respond(std::size_t state, int external_config) const;

  /// For a two-child chain: the last child's mechanism composed with the
  /// first one, as a function of the external configuration.
  [[nodiscard]] Mechanism composed(std::size_t state) const;
};

/// Digits of `index` in base `base`, most significant first, padded to
/// `digits` positions.
[[nodiscard]] std::vector<int> decode_base(std::size_t index, int base, int digits);
[[nodiscard]] std::size_t encode_base(std::span<const int> digits, int base);

/// Canonical domain for the single child of a Markovian exogenous variable:
/// |Omega_Y|^|Omega_X| states, state i maps parent configuration j to the
/// j-th base-|Omega_Y| digit of i.
[[nodiscard]] CanonicalDomain build_canonical_markovian(const PartialScm& model,
                                                        std::string_view child);

/// Canonical domain for an exogenous variable shared by a chain X -> Y1 -> Y2
/// where Y2's only endogenous parent is Y1. States enumerate (f1, f2) pairs,
/// f1-major.
[[nodiscard]] CanonicalDomain build_canonical_semimarkovian_chain(const PartialScm& model,
                                                                  std::string_view first,
                                                                  std::string_view second);

/// Reads the domain of an exogenous variable back from the model's equation
/// tables (works on reduced models, where labels are not the identity).
[[nodiscard]] CanonicalDomain extract_domain(const PartialScm& model, std::string_view exogenous);

/// Equation table of `child` induced by a domain: entry for (parent config x,
/// state u) at x * |domain| + u.
[[nodiscard]] std::vector<int> equation_table(const CanonicalDomain& domain, std::string_view child);

}  // namespace dccc
