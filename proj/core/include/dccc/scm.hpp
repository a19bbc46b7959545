#pragma once

// Discrete structural causal models with deterministic structural equations
// and (optionally) known exogenous priors.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dccc {

enum class VariableKind { endogenous, exogenous };

/// One coordinate of a merged endogenous variable (see markov_approx.hpp).
struct Component {
  std::string id;
  int size = 0;
};

struct Variable {
  std::string id;
  VariableKind kind = VariableKind::endogenous;
  int domain_size = 0;
  /// Exogenous only: original state index of each current state. Empty means
  /// the identity labelling 0..domain_size-1. Survives reductions.
  std::vector<int> state_labels;
  /// Exogenous only: size of the domain before any reduction (0 = domain_size).
  int original_size = 0;
  /// Endogenous only: non-empty for product-domain variables created by an
  /// endogenous merge. States are row-major over components, last fastest.
  std::vector<Component> components;

  [[nodiscard]] bool is_exogenous() const { return kind == VariableKind::exogenous; }
  [[nodiscard]] int label(int state) const {
    return state_labels.empty() ? state : state_labels.at(static_cast<std::size_t>(state));
  }
  [[nodiscard]] int full_size() const { return original_size > 0 ? original_size : domain_size; }
};

/// child = table[joint parent index]. Parents are the endogenous parents
/// followed by exactly one exogenous parent; the joint index is row-major with
/// the last-listed parent varying fastest. An empty table asks the model to
/// fill it with the canonical specification.
struct StructuralEquation {
  std::string child;
  std::vector<std::string> parents;
  std::vector<int> table;
};

using Priors = std::map<std::string, std::vector<double>>;

/// Dense joint distribution over `variables` (row-major, last fastest).
struct ProbabilityTable {
  std::vector<std::string> variables;
  std::vector<int> sizes;
  std::vector<double> values;

  [[nodiscard]] double at(std::span<const int> states) const;
  [[nodiscard]] double sum() const;
};

/// Interventions replace a child's equation by a constant; observations
/// condition on the post-intervention distribution.
struct Conditioning {
  std::map<std::string, int> interventions;
  std::map<std::string, int> observations;
};

/// A partially (or fully, when every exogenous prior is present) specified
/// SCM. Immutable after construction; the constructor validates the graph and
/// fills canonical tables for equations given without one.
class PartialScm {
 public:
  PartialScm() = default;
  PartialScm(std::vector<Variable> variables, std::vector<StructuralEquation> equations,
             Priors priors = {});

  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] const std::vector<StructuralEquation>& equations() const { return equations_; }
  [[nodiscard]] const Priors& priors() const { return priors_; }

  [[nodiscard]] bool has_variable(std::string_view id) const;
  [[nodiscard]] const Variable& variable(std::string_view id) const;
  [[nodiscard]] std::size_t index_of(std::string_view id) const;
  [[nodiscard]] const StructuralEquation& equation(std::string_view child) const;

  /// Endogenous ids in a topological order (stable w.r.t. declaration order).
  [[nodiscard]] const std::vector<std::string>& topological_order() const { return order_; }
  [[nodiscard]] std::vector<std::string> exogenous_ids() const;
  [[nodiscard]] std::vector<std::string> endogenous_ids() const;
  /// Endogenous children of an exogenous variable, in topological order.
  [[nodiscard]] std::vector<std::string> children_of(std::string_view exogenous) const;
  [[nodiscard]] std::vector<std::string> endogenous_parents(std::string_view child) const;
  [[nodiscard]] const std::string& exogenous_parent(std::string_view child) const;
  /// True if `ancestor` reaches `descendant` through endogenous edges.
  [[nodiscard]] bool is_ancestor(std::string_view ancestor, std::string_view descendant) const;

  [[nodiscard]] bool fully_specified() const;
  [[nodiscard]] PartialScm with_priors(Priors priors) const;
  [[nodiscard]] PartialScm without_priors() const;

 private:
  void validate_structure();
  void fill_canonical_tables();
  void validate_tables() const;
  void validate_priors() const;

  std::vector<Variable> variables_;
  std::vector<StructuralEquation> equations_;
  Priors priors_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::size_t, std::less<>> equation_index_;
  std::vector<std::string> order_;
};

/// Exogenous state identified by its original (pre-reduction) label.
using ExogenousState = std::pair<std::string, int>;

/// Removes the listed exogenous states from the model. Equivalent to imposing
/// P(u) = 0; states already removed are ignored, so the operation is
/// idempotent and order-independent. Priors, if present, are renormalized.
[[nodiscard]] PartialScm reduce(const PartialScm& model, std::span<const ExogenousState> states);

/// Exact distribution of `targets` by enumeration of the joint exogenous
/// state. Requires every prior. Throws ModelError if the conditioning event
/// has probability zero.
[[nodiscard]] ProbabilityTable evaluate_full_model(const PartialScm& model,
                                                   std::span<const std::string> targets,
                                                   const Conditioning& conditioning = {});

/// Solves every endogenous variable for a single joint exogenous state.
/// `exogenous_states` is indexed like `model.variables()` (entries for
/// endogenous positions are ignored). Interventions override equations.
void propagate(const PartialScm& model, std::span<const int> exogenous_states,
               const std::map<std::string, int>& interventions, std::span<int> values);

/// Row-major joint index of `states` over `sizes` (last fastest).
[[nodiscard]] std::size_t joint_index(std::span<const int> states, std::span<const int> sizes);
/// Inverse of joint_index.
[[nodiscard]] std::vector<int> joint_states(std::size_t index, std::span<const int> sizes);
[[nodiscard]] std::size_t joint_size(std::span<const int> sizes);

}  // namespace dccc
