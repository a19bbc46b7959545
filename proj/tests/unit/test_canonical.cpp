#include <doctest.h>

#include <vector>

#include "dccc/canonical.hpp"
#include "dccc/harness.hpp"
#include "fixtures.hpp"

using namespace dccc;

TEST_CASE("base digits are most significant first") {
  CHECK(decode_base(6, 2, 3) == std::vector<int>{1, 1, 0});
  CHECK(decode_base(1, 4, 2) == std::vector<int>{0, 1});
  for (std::size_t i = 0; i < 81; ++i) CHECK(encode_base(decode_base(i, 3, 4), 3) == i);
}

TEST_CASE("markovian domain enumerates every mechanism once") {
  const auto model = testing::treatment_survival_model();
  const auto d = build_canonical_markovian(model, "S");
  REQUIRE(d.size() == 4);
  CHECK(d.functions[0][0] == Mechanism{0, 0});
  CHECK(d.functions[1][0] == Mechanism{0, 1});
  CHECK(d.functions[2][0] == Mechanism{1, 0});
  CHECK(d.functions[3][0] == Mechanism{1, 1});
  CHECK(d.external_parents() == std::vector<std::string>{"T"});
  CHECK(d.external_configurations() == 2);
  CHECK(equation_table(d, "S") == model.equation("S").table);
}

TEST_CASE("markovian domain size is |Y|^|X| for wider domains") {
  std::vector<Variable> vars{{"A", VariableKind::endogenous, 3, {}, 0, {}},
                             {"B", VariableKind::endogenous, 2, {}, 0, {}},
                             {"C", VariableKind::endogenous, 3, {}, 0, {}},
                             {"UA", VariableKind::exogenous, 0, {}, 0, {}},
                             {"UB", VariableKind::exogenous, 0, {}, 0, {}},
                             {"UC", VariableKind::exogenous, 0, {}, 0, {}}};
  std::vector<StructuralEquation> eqs{{"A", {"UA"}, {}}, {"B", {"UB"}, {}}, {"C", {"A", "B", "UC"}, {}}};
  const PartialScm m(vars, eqs);
  CHECK(m.variable("UC").domain_size == 729);  // 3^(3*2)
  const auto d = build_canonical_markovian(m, "C");
  // State 5 = digits 000012: configurations (A=2,B=0) -> 1 and (A=2,B=1) -> 2.
  CHECK(d.functions[5][0] == Mechanism{0, 0, 0, 0, 1, 2});
}

TEST_CASE("chain domain is f1-major with 0, X, not X, 1 ordering") {
  const auto m = chain_skeleton();
  const auto d = build_canonical_semimarkovian_chain(m, "Y1", "Y2");
  REQUIRE(d.size() == 16);
  CHECK(d.external_parents() == std::vector<std::string>{"X"});
  const std::vector<Mechanism> f{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (std::size_t s = 0; s < 16; ++s) {
    CHECK(d.functions[s][0] == f[s / 4]);
    CHECK(d.functions[s][1] == f[s % 4]);
  }
  // u6 = (X, not Y1): Y2 = not X.
  CHECK(d.composed(6) == Mechanism{1, 0});
  CHECK(d.respond(6, 1) == std::vector<int>{1, 0});
}

TEST_CASE("extract_domain recovers the domain after a reduction") {
  const auto m = chain_skeleton();
  const std::vector<ExogenousState> drop{{"U", 0}, {"U", 5}};
  const auto reduced = reduce(m, drop);
  const auto d = extract_domain(reduced, "U");
  REQUIRE(d.size() == 14);
  CHECK(d.labels[0] == 1);
  CHECK(d.labels[4] == 6);
  const auto full = build_canonical_semimarkovian_chain(m, "Y1", "Y2");
  for (std::size_t s = 0; s < d.size(); ++s)
    CHECK(d.functions[s] == full.functions[static_cast<std::size_t>(d.labels[s])]);
}
