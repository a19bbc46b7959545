#include "dccc/oracle.hpp"

#include <cmath>
#include <random>

#include <boost/multiprecision/gmp.hpp>

#include "dccc/error.hpp"

namespace dccc {

namespace {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

const Integer kDenominator{1'000'000'000'000LL};

Rational rationalize(double v) {
  return Rational(Integer(std::llround(v * 1e12)), kDenominator);
}

// Dense simplex tableau: rows [A | rhs] with an explicit basis.
struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // excluding rhs
  std::vector<std::vector<Rational>> t;
  std::vector<std::size_t> basis;

  Rational& rhs(std::size_t i) { return t[i][cols]; }

  void pivot(std::size_t r, std::size_t c, std::vector<Rational>& z) {
    const Rational p = t[r][c];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || t[i][c] == 0) continue;
      const Rational f = t[i][c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
    }
    if (z[c] != 0) {
      const Rational f = z[c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[r][j] != 0) z[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Minimizes cost over the allowed columns with Bland's rule; returns the
  // optimal reduced-cost row (last entry holds minus the objective).
  std::vector<Rational> minimize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    std::vector<Rational> z(cols + 1);
    for (std::size_t j = 0; j < cols; ++j) z[j] = cost[j];
    for (std::size_t i = 0; i < rows; ++i) {
      const Rational& cb = cost[basis[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= cols; ++j) z[j] -= cb * t[i][j];
    }
    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        if (allowed[j] && z[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return z;
      std::size_t leave = rows;
      Rational best;
      for (std::size_t i = 0; i < rows; ++i) {
        if (t[i][enter] <= 0) continue;
        const Rational ratio = t[i][cols] / t[i][enter];
        if (leave == rows || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows) throw Error("linear program is unbounded");
      pivot(leave, enter, z);
    }
  }
};

// Rows of [1^T; A] that are exactly independent, normalization first.
std::vector<std::size_t> independent_rows(const ConstraintSystem& system) {
  const std::size_t n = system.cols();
  std::vector<std::vector<Rational>> echelon;
  std::vector<std::size_t> pivots;
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r <= system.rows(); ++r) {
    std::vector<Rational> row(n);
    for (std::size_t c = 0; c < n; ++c) row[c] = r == 0 ? 1 : system.at(r - 1, c);
    for (std::size_t k = 0; k < echelon.size(); ++k) {
      if (row[pivots[k]] == 0) continue;
      const Rational f = row[pivots[k]] / echelon[k][pivots[k]];
      for (std::size_t c = 0; c < n; ++c) row[c] -= f * echelon[k][c];
    }
    std::size_t p = 0;
    while (p < n && row[p] == 0) ++p;
    if (p == n) continue;
    echelon.push_back(std::move(row));
    pivots.push_back(p);
    kept.push_back(r);
  }
  return kept;
}

}  // namespace

double lp_bound(const ConstraintSystem& system, const LinearFunctional& objective, Sense sense) {
  const std::size_t n = system.cols();
  if (objective.coefficients.size() != n) throw Error("objective length differs from the column count");
  const auto kept = independent_rows(system);
  const std::size_t m = kept.size();

  Tableau tab;
  tab.rows = m;
  tab.cols = n + m;
  tab.t.assign(m, std::vector<Rational>(tab.cols + 1));
  tab.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = kept[i];
    Rational b = r == 0 ? Rational(1) : rationalize(system.rhs()[r - 1]);
    const int sign = b < 0 ? -1 : 1;
    for (std::size_t c = 0; c < n; ++c) tab.t[i][c] = sign * (r == 0 ? 1 : system.at(r - 1, c));
    tab.t[i][n + i] = 1;
    tab.rhs(i) = sign * b;
    tab.basis[i] = n + i;
  }

  std::vector<bool> all(tab.cols, true);
  std::vector<Rational> phase1(tab.cols);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = 1;
  const auto z1 = tab.minimize(phase1, all);
  if (-z1[tab.cols] != 0) throw InfeasibleEvidence("constraint polytope is empty");

  // Drive remaining artificial variables out of the basis.
  std::vector<Rational> dummy(tab.cols + 1);
  for (std::size_t i = 0; i < tab.rows; ++i) {
    if (tab.basis[i] < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (tab.t[i][c] != 0) {
        tab.pivot(i, c, dummy);
        break;
      }
    }
  }
  for (std::size_t i = tab.rows; i-- > 0;) {
    if (tab.basis[i] >= n) {
      tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
      tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
      --tab.rows;
    }
  }

  std::vector<bool> structural(tab.cols, false);
  for (std::size_t c = 0; c < n; ++c) structural[c] = true;
  std::vector<Rational> cost(tab.cols);
  for (std::size_t c = 0; c < n; ++c) {
    const Rational v = rationalize(objective.coefficients[c]);
    cost[c] = sense == Sense::minimize ? v : Rational(-v);
  }
  tab.minimize(cost, structural);
  Rational value = 0;
  for (std::size_t i = 0; i < tab.rows; ++i) value += cost[tab.basis[i]] * tab.rhs(i);
  if (sense == Sense::maximize) value = -value;
  return value.convert_to<double>();
}

LinearFunctional query_functional(const PartialScm& skeleton, const Query& query, const ConstraintSystem& system,
                                  const std::map<std::string, SolutionSet>& others) {
  const QueryIndicator indicator(skeleton, query);
  const auto& target = skeleton.variable(system.exogenous_id());
  std::map<int, std::size_t> position;
  for (int s = 0; s < target.domain_size; ++s) position[target.label(s)] = static_cast<std::size_t>(s);

  std::vector<std::vector<double>> fixed(indicator.exogenous().size());
  std::size_t slot = indicator.exogenous().size();
  for (std::size_t k = 0; k < indicator.exogenous().size(); ++k) {
    const auto& u = indicator.exogenous()[k];
    if (u == system.exogenous_id()) {
      slot = k;
      continue;
    }
    const auto it = others.find(u);
    if (it == others.end() || it->second.points.size() != 1)
      throw Error("query functional needs a single-vertex solution set for '" + u + "'");
    fixed[k] = prior_from_point(it->second, 0, skeleton);
  }
  if (slot == indicator.exogenous().size()) throw Error("system variable is not part of the model");

  LinearFunctional out;
  std::vector<const std::vector<double>*> priors(fixed.size());
  for (std::size_t k = 0; k < fixed.size(); ++k) priors[k] = &fixed[k];
  for (std::size_t c = 0; c < system.cols(); ++c) {
    const auto it = position.find(system.col_labels()[c]);
    if (it == position.end()) throw Error("system column missing from the model domain");
    fixed[slot].assign(static_cast<std::size_t>(target.domain_size), 0.0);
    fixed[slot][it->second] = 1.0;
    out.coefficients.push_back(indicator.evaluate(priors));
  }
  return out;
}

std::vector<std::vector<double>> sample_feasible(const ConstraintSystem& system, const SolutionSet& vertices,
                                                 std::size_t n, std::uint64_t seed) {
  if (vertices.points.empty()) throw InfeasibleEvidence("no vertices to sample from");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<std::vector<double>> out;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> w(vertices.points.size());
    double total = 0.0;
    for (double& x : w) total += (x = gamma(rng));
    std::vector<double> p(system.cols(), 0.0);
    for (std::size_t v = 0; v < w.size(); ++v)
      for (std::size_t c = 0; c < p.size(); ++c) p[c] += w[v] / total * vertices.points[v].probabilities[c];
    if (system.residual(p) > kResidualTolerance) throw Error("sampled mixture violates the constraint system");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace dccc
