#pragma once

// 0/1 linear systems A p = rhs over an exogenous domain, their exact rank, and
// the reduced-support solver used by the vertex search.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dccc/canonical.hpp"
#include "dccc/evidence.hpp"

namespace dccc {

enum class RowRegime { observational, interventional };

/// Endogenous cell a row constrains, e.g. P(Y1=0,Y2=1 | X=0) or
/// P(Y2=0 | do(Y1=1)).
struct RowLabel {
  RowRegime regime = RowRegime::observational;
  std::vector<std::pair<std::string, int>> targets;
  std::vector<std::pair<std::string, int>> given;

  [[nodiscard]] std::string str() const;
};

/// Half-open row range whose rows partition the outcomes of one context.
struct RowBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class ConstraintSystem {
 public:
  ConstraintSystem() = default;
  /// `matrix` is row-major rows x cols. Validates 0/1 entries, the block
  /// partition property and block rhs sums, then computes the exact rank.
  ConstraintSystem(std::string exogenous_id, std::size_t rows, std::size_t cols,
                   std::vector<std::uint8_t> matrix, std::vector<double> rhs,
                   std::vector<RowLabel> row_labels, std::vector<int> col_labels,
                   std::vector<RowBlock> blocks);

  [[nodiscard]] const std::string& exogenous_id() const { return exogenous_id_; }
  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::uint8_t at(std::size_t r, std::size_t c) const { return matrix_[r * cols_ + c]; }
  [[nodiscard]] const std::vector<std::uint8_t>& matrix() const { return matrix_; }
  [[nodiscard]] const std::vector<double>& rhs() const { return rhs_; }
  [[nodiscard]] const std::vector<RowLabel>& row_labels() const { return row_labels_; }
  /// Original exogenous state index of each column.
  [[nodiscard]] const std::vector<int>& col_labels() const { return col_labels_; }
  [[nodiscard]] const std::vector<RowBlock>& blocks() const { return blocks_; }
  /// Rank of the matrix stacked with the all-ones normalization row.
  [[nodiscard]] int rank() const { return rank_; }

  [[nodiscard]] std::vector<std::uint8_t> column(std::size_t c) const;
  /// Keeps the listed columns (in the given order), as if the others were
  /// removed from the exogenous domain.
  [[nodiscard]] ConstraintSystem restrict_columns(std::span<const int> keep) const;
  /// Stacks another system over the same columns below this one.
  [[nodiscard]] ConstraintSystem stacked(const ConstraintSystem& below) const;
  /// Max-norm residual of A p - rhs together with the normalization row.
  [[nodiscard]] double residual(std::span<const double> p) const;

  /// Rows are constraints, columns are states, the final column is rhs.
  void write_csv(std::ostream& out) const;

 private:
  std::string exogenous_id_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> matrix_;
  std::vector<double> rhs_;
  std::vector<RowLabel> row_labels_;
  std::vector<int> col_labels_;
  std::vector<RowBlock> blocks_;
  int rank_ = 1;
};

/// Exact rank of [A; 1^T] by fraction-free elimination over big integers.
[[nodiscard]] int exact_rank(std::span<const std::uint8_t> matrix, std::size_t rows, std::size_t cols);
[[nodiscard]] inline int exact_rank(const ConstraintSystem& system) {
  return exact_rank(system.matrix(), system.rows(), system.cols());
}

/// Rows (x, y) from P~(Y | X) for the single child of a Markovian domain.
[[nodiscard]] ConstraintSystem build_markovian_system(const CanonicalDomain& domain,
                                                      const Evidence& evidence);
/// Rows (x, y1, y2) from P~(Y1, Y2 | X) for a confounded chain.
[[nodiscard]] ConstraintSystem build_semimarkovian_observational(const CanonicalDomain& domain,
                                                                 const Evidence& evidence);
/// Rows (pa, y) from P~(child | do(parents)) for every child of the domain.
[[nodiscard]] ConstraintSystem build_semimarkovian_experimental(const CanonicalDomain& domain,
                                                                const Evidence& evidence);
/// Observational rows followed by the do-rows of children whose parents
/// include another child of the domain.
[[nodiscard]] ConstraintSystem build_semimarkovian_combined(const CanonicalDomain& domain,
                                                            const Evidence& evidence);

struct ExtremePoint {
  std::string exogenous_id;
  std::vector<double> probabilities;
  std::vector<int> support;
};

enum class SupportStatus { feasible, rank_deficient, inconsistent, negative };

[[nodiscard]] const char* to_string(SupportStatus status);

struct SupportResult {
  SupportStatus status = SupportStatus::rank_deficient;
  ExtremePoint point;
};

/// Reusable solver for restricted systems; keeps its scratch buffers between
/// calls. Not thread-safe; use one instance per thread.
class SupportSolver {
 public:
  explicit SupportSolver(const ConstraintSystem& system);
  /// Solves for the unique distribution supported on `support` (sorted
  /// column indices). On success writes the dense point into `out`.
  SupportStatus solve(std::span<const int> support, std::vector<double>& out);

 private:
  const ConstraintSystem* system_;
  std::vector<double> work_;
  std::vector<double> solution_;
};

[[nodiscard]] SupportResult solve_support(const ConstraintSystem& system, std::span<const int> support);

/// Tolerances shared by the solver, the search and the checks.
inline constexpr double kResidualTolerance = 1e-7;
inline constexpr double kNegativityTolerance = 1e-9;
inline constexpr double kDedupTolerance = 1e-9;

}  // namespace dccc
