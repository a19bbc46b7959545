#pragma once

// PNS and interventional queries: point evaluation on fully specified models
// and interval aggregation over solution sets.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "dccc/scm.hpp"
#include "dccc/search.hpp"

namespace dccc {

enum class QueryKind { pns, interventional };

/// PNS: P(effect_{cause=x} = y, effect_{cause=x'} = y').
/// Interventional: P(effect = y | do(cause = x)).
struct Query {
  QueryKind kind = QueryKind::pns;
  std::string cause;
  std::string effect;
  int x = 1;
  int x_prime = 0;
  int y = 1;
  int y_prime = 0;

  /// "pns:C:E[:x,x',y,y']" or "do:C:E[:x,y]".
  [[nodiscard]] static Query parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

/// The query's indicator over the joint exogenous space of a model skeleton.
/// Only joint states where the indicator is 1 are stored.
class QueryIndicator {
 public:
  QueryIndicator(const PartialScm& skeleton, const Query& query);

  [[nodiscard]] const std::vector<std::string>& exogenous() const { return exogenous_; }
  [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
  /// Joint exogenous states (one digit per exogenous variable) with indicator 1.
  [[nodiscard]] const std::vector<std::vector<int>>& hits() const { return hits_; }
  /// Query value under independent exogenous distributions, one dense vector
  /// per exogenous variable in `exogenous()` order.
  [[nodiscard]] double evaluate(const std::vector<const std::vector<double>*>& priors) const;

 private:
  std::vector<std::string> exogenous_;
  std::vector<int> sizes_;
  std::vector<std::vector<int>> hits_;
};

/// Twin-world evaluation on a fully specified model.
[[nodiscard]] double evaluate_pns(const PartialScm& model, const Query& query);
/// Distribution of `target` under the interventions.
[[nodiscard]] ProbabilityTable evaluate_interventional(const PartialScm& model, const std::string& target,
                                                       const std::map<std::string, int>& interventions);
/// Dispatches on query.kind.
[[nodiscard]] double evaluate_query(const PartialScm& model, const Query& query);

struct QueryInterval {
  double lower = 0.0;
  double upper = 0.0;
  /// Vertex index per exogenous variable (skeleton order) attaining each bound.
  std::vector<std::size_t> arg_lower;
  std::vector<std::size_t> arg_upper;
  std::vector<std::string> exogenous;
  std::size_t combinations = 0;
  bool complete = false;

  [[nodiscard]] double length() const { return upper - lower; }
};

/// Min and max of the query over every combination of vertices, one per
/// exogenous variable. Ties keep the lowest combination index. Throws
/// InfeasibleEvidence for an empty solution set and NotComputable when the
/// query intervenes on a component of a merged variable.
[[nodiscard]] QueryInterval bound_query(const std::map<std::string, SolutionSet>& solutions,
                                        const PartialScm& skeleton, const Query& query);

/// Dense prior over the skeleton's (possibly reduced) domain of the solution
/// set's variable.
[[nodiscard]] std::vector<double> prior_from_point(const SolutionSet& set, std::size_t point,
                                                   const PartialScm& skeleton);

/// The skeleton with each exogenous prior set to the chosen vertex.
[[nodiscard]] PartialScm instantiate(const std::map<std::string, SolutionSet>& solutions,
                                     const PartialScm& skeleton, const std::vector<std::size_t>& choice);

}  // namespace dccc
