#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dccc/constraint_system.hpp"
#include "dccc/query.hpp"
#include "dccc/search.hpp"

namespace dccc {

/// Coefficients of a linear query over the columns of a constraint system.
struct LinearFunctional {
  std::vector<double> coefficients;
};

enum class Sense { minimize, maximize };

/// Optimum of the functional over {p >= 0, A p = rhs, sum p = 1}, computed
/// with an exact rational simplex. The rhs is rounded to the nearest multiple
/// of 1e-12 first. Throws InfeasibleEvidence if the polytope is empty.
[[nodiscard]] double lp_bound(const ConstraintSystem& system, const LinearFunctional& objective, Sense sense);

/// Functional of `query` over the columns of `system`, obtained by pinning the
/// system's exogenous variable to each column's state in turn. Every other
/// exogenous variable must have a single-vertex solution set.
[[nodiscard]] LinearFunctional query_functional(const PartialScm& skeleton, const Query& query,
                                                const ConstraintSystem& system,
                                                const std::map<std::string, SolutionSet>& others);

/// `n` Dirichlet(1) mixtures of the vertices. Throws if `vertices` is empty.
[[nodiscard]] std::vector<std::vector<double>> sample_feasible(const ConstraintSystem& system,
                                                               const SolutionSet& vertices, std::size_t n,
                                                               std::uint64_t seed);

}  // namespace dccc
