#pragma once

// Models and literal tables shared by the unit and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "dccc/evidence.hpp"
#include "dccc/scm.hpp"

namespace dccc::testing {

/// T <- Q, S <- (T, R), both equations canonical: |Q| = 2, |R| = 4.
inline PartialScm treatment_survival_model() {
  std::vector<Variable> variables{
      {"T", VariableKind::endogenous, 2, {}, 0, {}},
      {"S", VariableKind::endogenous, 2, {}, 0, {}},
      {"Q", VariableKind::exogenous, 0, {}, 0, {}},
      {"R", VariableKind::exogenous, 0, {}, 0, {}},
  };
  std::vector<StructuralEquation> equations{{"T", {"Q"}, {}}, {"S", {"T", "R"}, {}}};
  return PartialScm(std::move(variables), std::move(equations));
}

inline Evidence treatment_survival_evidence() {
  Evidence ev;
  ev.observational.push_back({{"T"}, {}, {2}, {}, {0.337, 0.663}});
  ev.observational.push_back({{"S"}, {"T"}, {2}, {2}, {0.462, 0.538, 0.323, 0.677}});
  return ev;
}

using Matrix = std::vector<std::vector<int>>;

/// Rows (t, s) in order (0,0), (0,1), (1,0), (1,1); columns r0..r3.
inline const Matrix kMarkovianRows{
    {1, 1, 0, 0},
    {0, 0, 1, 1},
    {1, 0, 1, 0},
    {0, 1, 0, 1},
};

/// P(Y1, Y2 | X) rows in (x, y1, y2) order over the 16 chain states.
inline const Matrix kChainObservational{
    {1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1},
    {1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0},
    {0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1},
};

/// P(Y1 | do(X)) rows (x, y1) then P(Y2 | do(Y1)) rows (y1, y2).
inline const Matrix kChainExperimental{
    {1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1},
    {1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1},
    {1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0},
    {0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1},
    {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0},
    {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1},
};

/// Combined system: the observational rows, then the P(Y2 | do(Y1)) rows.
inline Matrix chain_combined() {
  Matrix m = kChainObservational;
  m.insert(m.end(), kChainExperimental.begin() + 4, kChainExperimental.end());
  return m;
}

/// Merged domain U*: rows (x, y1, y2) over the 16 states of the merged child.
inline const Matrix kMergedRows{
    {1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1},
    {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0},
    {0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0},
    {0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0},
    {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1},
};

inline const std::vector<int> kForbiddenMergedStates{1, 4, 11, 14};

template <class System>
Matrix dense(const System& system) {
  Matrix m(system.rows(), std::vector<int>(system.cols()));
  for (std::size_t r = 0; r < system.rows(); ++r)
    for (std::size_t c = 0; c < system.cols(); ++c) m[r][c] = system.at(r, c);
  return m;
}

}  // namespace dccc::testing
