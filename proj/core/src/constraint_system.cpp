#include "dccc/constraint_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <boost/multiprecision/gmp.hpp>

#include "dccc/error.hpp"
#include "dccc/io.hpp"

namespace dccc {

namespace {

constexpr double kBlockTolerance = 1e-9;
constexpr double kPivotTolerance = 1e-9;

void append_assignment(std::string& out, const std::vector<std::pair<std::string, int>>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out += ',';
    out += cells[k].first + '=' + std::to_string(cells[k].second);
  }
}

// Incrementally assembled system.
struct Builder {
  std::string exogenous_id;
  std::size_t cols = 0;
  std::vector<std::uint8_t> matrix;
  std::vector<double> rhs;
  std::vector<RowLabel> labels;
  std::vector<RowBlock> blocks;

  void open_block() { blocks.push_back({rhs.size(), rhs.size()}); }
  void add_row(std::vector<std::uint8_t> row, double value, RowLabel label) {
    matrix.insert(matrix.end(), row.begin(), row.end());
    rhs.push_back(value);
    labels.push_back(std::move(label));
    blocks.back().end = rhs.size();
  }
  ConstraintSystem finish(const CanonicalDomain& domain) {
    return {exogenous_id, rhs.size(), cols, std::move(matrix), std::move(rhs), std::move(labels),
            domain.labels, std::move(blocks)};
  }
};

std::vector<std::pair<std::string, int>> cells(const std::vector<std::string>& ids, const std::vector<int>& states) {
  std::vector<std::pair<std::string, int>> out;
  for (std::size_t k = 0; k < ids.size(); ++k) out.emplace_back(ids[k], states[k]);
  return out;
}

void add_observational_rows(Builder& b, const CanonicalDomain& domain, const Evidence& evidence) {
  const auto ext = domain.external_parents();
  const auto ext_sizes = domain.external_sizes();
  const auto table = derive_conditional(evidence, domain.children, ext);
  const auto n = domain.size();
  const auto n_ext = joint_size(ext_sizes);
  const auto n_out = joint_size(domain.child_sizes);
  for (std::size_t g = 0; g < n_ext; ++g) {
    std::vector<std::size_t> outcome(n);
    for (std::size_t u = 0; u < n; ++u)
      outcome[u] = joint_index(domain.respond(u, static_cast<int>(g)), domain.child_sizes);
    b.open_block();
    const auto given = cells(ext, joint_states(g, ext_sizes));
    for (std::size_t t = 0; t < n_out; ++t) {
      std::vector<std::uint8_t> row(n);
      for (std::size_t u = 0; u < n; ++u) row[u] = outcome[u] == t ? 1 : 0;
      b.add_row(std::move(row), table.at(g, t),
                {RowRegime::observational, cells(domain.children, joint_states(t, domain.child_sizes)), given});
    }
  }
}

void add_experimental_rows(Builder& b, const CanonicalDomain& domain, const Evidence& evidence,
                           std::size_t c) {
  const auto& child = domain.children[c];
  const auto& pa = domain.parents[c];
  const auto& pa_sizes = domain.parent_sizes[c];
  const std::vector<std::string> target{child};
  const ConditionalTable* table = evidence.find_experimental(target, pa);
  ConditionalTable derived;
  if (table == nullptr && pa.empty()) {
    // do() on nothing is plain observation.
    derived = derive_conditional(evidence, target, {});
    table = &derived;
  }
  if (table == nullptr) {
    std::string msg = "missing experimental table P~(" + child + " | do(";
    for (std::size_t k = 0; k < pa.size(); ++k) msg += (k > 0 ? "," : "") + pa[k];
    throw EvidenceError(msg + "))");
  }
  const auto n = domain.size();
  const int q = domain.child_sizes[c];
  std::map<std::string, int> assignment;
  for (std::size_t g = 0; g < joint_size(pa_sizes); ++g) {
    const auto states = joint_states(g, pa_sizes);
    for (std::size_t k = 0; k < pa.size(); ++k) assignment[pa[k]] = states[k];
    b.open_block();
    for (int y = 0; y < q; ++y) {
      assignment[child] = y;
      std::vector<std::uint8_t> row(n);
      for (std::size_t u = 0; u < n; ++u) row[u] = domain.functions[u][c][g] == y ? 1 : 0;
      b.add_row(std::move(row), table->probability(assignment),
                {RowRegime::interventional, {{child, y}}, cells(pa, states)});
    }
  }
}

Builder start(const CanonicalDomain& domain) {
  Builder b;
  b.exogenous_id = domain.exogenous_id;
  b.cols = domain.size();
  return b;
}

bool depends_on_sibling(const CanonicalDomain& domain, std::size_t c) {
  return std::any_of(domain.parents[c].begin(), domain.parents[c].end(), [&](const std::string& p) {
    return std::find(domain.children.begin(), domain.children.end(), p) != domain.children.end();
  });
}

}  // namespace

std::string RowLabel::str() const {
  std::string out = "P(";
  append_assignment(out, targets);
  if (!given.empty()) {
    out += '|';
    if (regime == RowRegime::interventional) out += "do(";
    append_assignment(out, given);
    if (regime == RowRegime::interventional) out += ')';
  }
  return out + ')';
}

ConstraintSystem::ConstraintSystem(std::string exogenous_id, std::size_t rows, std::size_t cols,
                                   std::vector<std::uint8_t> matrix, std::vector<double> rhs,
                                   std::vector<RowLabel> row_labels, std::vector<int> col_labels,
                                   std::vector<RowBlock> blocks)
    : exogenous_id_(std::move(exogenous_id)),
      rows_(rows),
      cols_(cols),
      matrix_(std::move(matrix)),
      rhs_(std::move(rhs)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      blocks_(std::move(blocks)) {
  if (matrix_.size() != rows_ * cols_ || rhs_.size() != rows_ || row_labels_.size() != rows_ ||
      col_labels_.size() != cols_)
    throw Error("constraint system dimensions disagree");
  if (std::any_of(matrix_.begin(), matrix_.end(), [](std::uint8_t v) { return v > 1; }))
    throw Error("constraint matrix entries must be 0 or 1");
  for (const auto& block : blocks_) {
    if (block.begin > block.end || block.end > rows_) throw Error("row block out of range");
    for (std::size_t c = 0; c < cols_; ++c) {
      int ones = 0;
      for (std::size_t r = block.begin; r < block.end; ++r) ones += at(r, c);
      if (ones != 1) throw Error("row block does not partition the outcomes of column " + std::to_string(c));
    }
    double total = 0.0;
    for (std::size_t r = block.begin; r < block.end; ++r) total += rhs_[r];
    if (std::abs(total - 1.0) > kBlockTolerance)
      throw EvidenceError("rhs of a context block sums to " + std::to_string(total));
  }
  rank_ = exact_rank(matrix_, rows_, cols_);
}

std::vector<std::uint8_t> ConstraintSystem::column(std::size_t c) const {
  std::vector<std::uint8_t> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

ConstraintSystem ConstraintSystem::restrict_columns(std::span<const int> keep) const {
  std::vector<std::uint8_t> m(rows_ * keep.size());
  std::vector<int> labels;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const auto c = static_cast<std::size_t>(keep[j]);
    if (c >= cols_) throw Error("column index out of range");
    labels.push_back(col_labels_[c]);
    for (std::size_t r = 0; r < rows_; ++r) m[r * keep.size() + j] = at(r, c);
  }
  return {exogenous_id_, rows_, keep.size(), std::move(m), rhs_, row_labels_, std::move(labels), blocks_};
}

ConstraintSystem ConstraintSystem::stacked(const ConstraintSystem& below) const {
  if (below.cols_ != cols_) throw Error("stacked systems must share columns");
  auto m = matrix_;
  m.insert(m.end(), below.matrix_.begin(), below.matrix_.end());
  auto r = rhs_;
  r.insert(r.end(), below.rhs_.begin(), below.rhs_.end());
  auto labels = row_labels_;
  labels.insert(labels.end(), below.row_labels_.begin(), below.row_labels_.end());
  auto blocks = blocks_;
  for (auto b : below.blocks_) blocks.push_back({b.begin + rows_, b.end + rows_});
  return {exogenous_id_, rows_ + below.rows_, cols_, std::move(m), std::move(r), std::move(labels),
          col_labels_, std::move(blocks)};
}

double ConstraintSystem::residual(std::span<const double> p) const {
  double worst = 0.0;
  double total = 0.0;
  for (double v : p) total += v;
  worst = std::abs(total - 1.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c)
      if (at(r, c)) s += p[c];
    worst = std::max(worst, std::abs(s - rhs_[r]));
  }
  return worst;
}

void ConstraintSystem::write_csv(std::ostream& out) const {
  out << "row";
  for (int label : col_labels_) out << ",u" << label;
  out << ",rhs\n";
  for (std::size_t r = 0; r < rows_; ++r) {
    out << '"' << row_labels_[r].str() << '"';
    for (std::size_t c = 0; c < cols_; ++c) out << ',' << static_cast<int>(at(r, c));
    out << ',' << format_double(rhs_[r]) << '\n';
  }
}

int exact_rank(std::span<const std::uint8_t> matrix, std::size_t rows, std::size_t cols) {
  using boost::multiprecision::mpz_int;
  const std::size_t n_rows = rows + 1;
  std::vector<std::vector<mpz_int>> m(n_rows, std::vector<mpz_int>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m[r][c] = matrix[r * cols + c];
  for (std::size_t c = 0; c < cols; ++c) m[rows][c] = 1;

  std::size_t rank = 0;
  mpz_int previous = 1;
  for (std::size_t c = 0; c < cols && rank < n_rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < n_rows && m[pivot][c] == 0) ++pivot;
    if (pivot == n_rows) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t i = rank + 1; i < n_rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j)
        m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / previous;
      m[i][c] = 0;
    }
    previous = m[rank][c];
    ++rank;
  }
  return static_cast<int>(rank);
}

ConstraintSystem build_markovian_system(const CanonicalDomain& domain, const Evidence& evidence) {
  if (domain.children.size() != 1)
    throw ModelError("exogenous '" + domain.exogenous_id + "' is not Markovian");
  auto b = start(domain);
  add_observational_rows(b, domain, evidence);
  return b.finish(domain);
}

ConstraintSystem build_semimarkovian_observational(const CanonicalDomain& domain, const Evidence& evidence) {
  auto b = start(domain);
  add_observational_rows(b, domain, evidence);
  return b.finish(domain);
}

ConstraintSystem build_semimarkovian_experimental(const CanonicalDomain& domain, const Evidence& evidence) {
  auto b = start(domain);
  for (std::size_t c = 0; c < domain.children.size(); ++c) add_experimental_rows(b, domain, evidence, c);
  return b.finish(domain);
}

ConstraintSystem build_semimarkovian_combined(const CanonicalDomain& domain, const Evidence& evidence) {
  auto b = start(domain);
  add_observational_rows(b, domain, evidence);
  for (std::size_t c = 0; c < domain.children.size(); ++c)
    if (depends_on_sibling(domain, c)) add_experimental_rows(b, domain, evidence, c);
  return b.finish(domain);
}

const char* to_string(SupportStatus status) {
  switch (status) {
    case SupportStatus::feasible: return "feasible";
    case SupportStatus::rank_deficient: return "rank_deficient";
    case SupportStatus::inconsistent: return "inconsistent";
    case SupportStatus::negative: return "negative";
  }
  return "unknown";
}

SupportSolver::SupportSolver(const ConstraintSystem& system) : system_(&system) {}

SupportStatus SupportSolver::solve(std::span<const int> support, std::vector<double>& out) {
  const auto& sys = *system_;
  const std::size_t m = sys.rows() + 1;
  const std::size_t k = support.size();
  const std::size_t w = k + 1;
  for (int c : support)
    if (c < 0 || static_cast<std::size_t>(c) >= sys.cols()) throw Error("support index out of range");

  work_.resize(m * w);
  for (std::size_t r = 0; r < sys.rows(); ++r) {
    double* row = &work_[r * w];
    for (std::size_t j = 0; j < k; ++j) row[j] = sys.at(r, static_cast<std::size_t>(support[j]));
    row[k] = sys.rhs()[r];
  }
  {
    double* row = &work_[(m - 1) * w];
    for (std::size_t j = 0; j < k; ++j) row[j] = 1.0;
    row[k] = 1.0;
  }

  // Gaussian elimination with partial pivoting; a vanishing pivot means the
  // restricted columns are dependent.
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t best = j;
    double best_abs = std::abs(work_[j * w + j]);
    for (std::size_t i = j + 1; i < m; ++i) {
      const double a = std::abs(work_[i * w + j]);
      if (a > best_abs) {
        best = i;
        best_abs = a;
      }
    }
    if (best_abs < kPivotTolerance) return SupportStatus::rank_deficient;
    if (best != j)
      std::swap_ranges(work_.begin() + static_cast<std::ptrdiff_t>(j * w),
                       work_.begin() + static_cast<std::ptrdiff_t>((j + 1) * w),
                       work_.begin() + static_cast<std::ptrdiff_t>(best * w));
    const double* pivot_row = &work_[j * w];
    for (std::size_t i = j + 1; i < m; ++i) {
      double* row = &work_[i * w];
      const double f = row[j] / pivot_row[j];
      if (f == 0.0) continue;
      for (std::size_t t = j; t < w; ++t) row[t] -= f * pivot_row[t];
    }
  }
  solution_.assign(k, 0.0);
  for (std::size_t j = k; j-- > 0;) {
    const double* row = &work_[j * w];
    double s = row[k];
    for (std::size_t t = j + 1; t < k; ++t) s -= row[t] * solution_[t];
    solution_[j] = s / row[j];
  }

  // True residual on the original rows.
  double total = 0.0;
  for (double v : solution_) total += v;
  if (std::abs(total - 1.0) > kResidualTolerance) return SupportStatus::inconsistent;
  for (std::size_t r = 0; r < sys.rows(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (sys.at(r, static_cast<std::size_t>(support[j]))) s += solution_[j];
    if (std::abs(s - sys.rhs()[r]) > kResidualTolerance) return SupportStatus::inconsistent;
  }
  for (double v : solution_)
    if (v < -kNegativityTolerance) return SupportStatus::negative;

  out.assign(sys.cols(), 0.0);
  double mass = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double v = std::max(solution_[j], 0.0);
    out[static_cast<std::size_t>(support[j])] = v;
    mass += v;
  }
  for (double& v : out) v /= mass;
  return SupportStatus::feasible;
}

SupportResult solve_support(const ConstraintSystem& system, std::span<const int> support) {
  SupportSolver solver(system);
  SupportResult result;
  result.point.exogenous_id = system.exogenous_id();
  result.status = solver.solve(support, result.point.probabilities);
  if (result.status == SupportStatus::feasible) {
    for (std::size_t c = 0; c < result.point.probabilities.size(); ++c)
      if (result.point.probabilities[c] > kNegativityTolerance) result.point.support.push_back(static_cast<int>(c));
  } else {
    result.point.probabilities.clear();
  }
  return result;
}

}  // namespace dccc
