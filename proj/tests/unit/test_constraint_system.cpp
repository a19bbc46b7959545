#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dccc/constraint_system.hpp"
#include "dccc/error.hpp"
#include "dccc/harness.hpp"
#include "dccc/search.hpp"
#include "fixtures.hpp"

using namespace dccc;

namespace {

std::vector<std::uint8_t> flatten(const testing::Matrix& m) {
  std::vector<std::uint8_t> out;
  for (const auto& row : m)
    for (int v : row) out.push_back(static_cast<std::uint8_t>(v));
  return out;
}

ConstraintSystem example_system() {
  return build_system(testing::treatment_survival_model(), testing::treatment_survival_evidence(), "R",
                      Regime::markovian);
}

}  // namespace

TEST_CASE("exact rank of the literal tables") {
  CHECK(exact_rank(flatten(testing::kMarkovianRows), 4, 4) == 3);
  CHECK(exact_rank(flatten(testing::kChainObservational), 8, 16) == 7);
  CHECK(exact_rank(flatten(testing::kChainExperimental), 8, 16) == 5);
  const auto combined = testing::chain_combined();
  CHECK(exact_rank(flatten(combined), combined.size(), 16) == 9);
  CHECK(exact_rank(flatten(testing::kMergedRows), 8, 16) == 7);
}

TEST_CASE("exact rank on small hand cases") {
  const std::vector<std::uint8_t> identity{1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(exact_rank(identity, 3, 3) == 3);
  const std::vector<std::uint8_t> empty;
  CHECK(exact_rank(empty, 0, 5) == 1);  // the normalization row alone
  const std::vector<std::uint8_t> repeated{1, 1, 0, 1, 1, 0};
  CHECK(exact_rank(repeated, 2, 3) == 2);
}

TEST_CASE("exact rank agrees with a double-precision elimination on random 0/1 matrices") {
  std::mt19937 rng(3);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 1 + trial % 7, cols = 2 + trial % 9;
    std::vector<std::uint8_t> m(rows * cols);
    for (auto& v : m) v = coin(rng) ? 1 : 0;
    std::vector<std::vector<double>> a(rows + 1, std::vector<double>(cols, 1.0));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) a[r][c] = m[r * cols + c];
    int rank = 0;
    for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows + 1); ++c) {
      std::size_t pivot = static_cast<std::size_t>(rank);
      for (std::size_t r = pivot; r <= rows; ++r)
        if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
      if (std::abs(a[pivot][c]) < 1e-9) continue;
      std::swap(a[pivot], a[static_cast<std::size_t>(rank)]);
      for (std::size_t r = 0; r <= rows; ++r) {
        if (r == static_cast<std::size_t>(rank)) continue;
        const double f = a[r][c] / a[static_cast<std::size_t>(rank)][c];
        for (std::size_t k = 0; k < cols; ++k) a[r][k] -= f * a[static_cast<std::size_t>(rank)][k];
      }
      ++rank;
    }
    CHECK(exact_rank(m, rows, cols) == rank);
  }
}

TEST_CASE("constructor validates entries and block partitions") {
  std::vector<RowLabel> labels(2);
  CHECK_THROWS_AS(ConstraintSystem("U", 2, 2, {1, 2, 0, 1}, {0.5, 0.5}, labels, {0, 1}, {}), Error);
  CHECK_THROWS_AS(ConstraintSystem("U", 2, 2, {1, 1, 0, 1}, {0.5, 0.5}, labels, {0, 1}, {{0, 2}}), Error);
  CHECK_THROWS_AS(ConstraintSystem("U", 2, 2, {1, 0, 0, 1}, {0.5, 0.6}, labels, {0, 1}, {{0, 2}}), EvidenceError);
  CHECK_NOTHROW(ConstraintSystem("U", 2, 2, {1, 0, 0, 1}, {0.4, 0.6}, labels, {0, 1}, {{0, 2}}));
}

TEST_CASE("markovian system rows and rhs") {
  const auto s = example_system();
  CHECK(testing::dense(s) == testing::kMarkovianRows);
  CHECK(s.rhs() == std::vector<double>{0.462, 0.538, 0.323, 0.677});
  CHECK(s.rank() == 3);
  CHECK(s.row_labels()[2].str() == "P(S=0|T=1)");
}

TEST_CASE("row labels name the regime") {
  const auto inst = generate_instance(instance_seed(7, 0));
  const auto e = build_system(chain_skeleton(), inst.evidence, "U", Regime::s_e);
  CHECK(e.row_labels()[0].str() == "P(Y1=0|do(X=0))");
  CHECK(e.row_labels()[7].str() == "P(Y2=1|do(Y1=1))");
  const auto o = build_system(chain_skeleton(), inst.evidence, "U", Regime::s_o);
  CHECK(o.row_labels()[1].str() == "P(Y1=0,Y2=1|X=0)");
}

TEST_CASE("csv dump has one column per state and a final rhs column") {
  std::ostringstream out;
  example_system().write_csv(out);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "row,u0,u1,u2,u3,rhs");
  CHECK(first == "\"P(S=0|T=0)\",1,1,0,0,0.462");
}

TEST_CASE("restrict, stack and residual") {
  const auto s = example_system();
  const std::vector<int> keep{0, 1, 3};
  const auto r = s.restrict_columns(keep);
  CHECK(r.cols() == 3);
  CHECK(r.col_labels() == std::vector<int>{0, 1, 3});
  CHECK(r.column(2) == s.column(3));

  const auto both = s.stacked(s);
  CHECK(both.rows() == 8);
  CHECK(both.rank() == 3);

  const std::vector<double> p1{0.323, 0.139, 0.0, 0.538};
  CHECK(s.residual(p1) < 1e-12);
  const std::vector<double> bad{0.25, 0.25, 0.25, 0.25};
  CHECK(s.residual(bad) > 0.1);
}

TEST_CASE("support solver statuses") {
  const auto s = example_system();
  const std::vector<int> good{0, 1, 3}, negative{0, 2, 3}, inconsistent{1};
  const auto ok = solve_support(s, good);
  CHECK(ok.status == SupportStatus::feasible);
  CHECK(ok.point.probabilities[0] == doctest::Approx(0.323));
  CHECK(solve_support(s, negative).status == SupportStatus::negative);
  CHECK(solve_support(s, inconsistent).status != SupportStatus::feasible);
  CHECK(std::string(to_string(SupportStatus::rank_deficient)) == "rank_deficient");
}

TEST_CASE("experimental builder requires the do tables") {
  const auto inst = generate_instance(instance_seed(7, 1));
  Evidence partial = inst.evidence;
  partial.experimental.pop_back();
  CHECK_THROWS_AS((void)build_system(chain_skeleton(), partial, "U", Regime::s_e), EvidenceError);
}
