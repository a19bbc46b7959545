#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "dccc/canonical.hpp"
#include "dccc/error.hpp"
#include "dccc/harness.hpp"
#include "dccc/markov_approx.hpp"
#include "dccc/query.hpp"
#include "fixtures.hpp"

using namespace dccc;

namespace {

SolutionSet merged_set(std::vector<std::vector<double>> points) {
  SolutionSet s;
  s.exogenous_id = "U*";
  s.complete = true;
  for (int i = 0; i < 16; ++i) s.col_labels.push_back(i);
  for (auto& p : points) {
    ExtremePoint e;
    e.exogenous_id = "U*";
    e.probabilities = std::move(p);
    s.points.push_back(std::move(e));
  }
  return s;
}

StateMapping chain_mapping() {
  const auto skeleton = chain_skeleton();
  const auto [merged, spec] = endogenous_merge(skeleton, "U");
  return build_state_mapping(extract_domain(skeleton, "U"), extract_domain(merged, spec.merged_exogenous_id));
}

}  // namespace

TEST_CASE("merging the chain children") {
  const auto skeleton = chain_skeleton();
  const auto [merged, spec] = endogenous_merge(skeleton, "U");
  CHECK(spec.members == std::vector<std::string>{"Y1", "Y2"});
  CHECK(spec.replaced_exogenous == std::vector<std::string>{"U"});
  CHECK(spec.external_parents == std::vector<std::string>{"X"});
  CHECK(spec.merged_domain_size == 4);
  CHECK(merged.has_variable(spec.merged_id));
  CHECK_FALSE(merged.has_variable("Y1"));
  CHECK(merged.variable(spec.merged_id).domain_size == 4);
  CHECK(merged.variable(spec.merged_id).components.size() == 2);
  CHECK(merged.variable(spec.merged_exogenous_id).domain_size == 16);
  CHECK(merged.children_of(spec.merged_exogenous_id) == std::vector<std::string>{spec.merged_id});
  CHECK(merged_state(spec, {1, 0}) == 2);
}

TEST_CASE("merged evidence is the joint conditional of the members") {
  const auto inst = generate_instance(instance_seed(2, 4));
  const auto [merged, spec] = endogenous_merge(chain_skeleton(), "U");
  const auto ev = merge_evidence(inst.evidence, spec);
  const std::vector<std::string> target{spec.merged_id}, x{"X"};
  const auto* table = ev.find_observational(target, x);
  REQUIRE(table != nullptr);
  CHECK(table->values == inst.evidence.observational[1].values);
  CHECK_NOTHROW(ev.check_against(merged));
}

TEST_CASE("splitting gives each child its own canonical parent") {
  const auto split = exogenous_split(chain_skeleton(), "U");
  CHECK_FALSE(split.has_variable("U"));
  CHECK(split.exogenous_parent("Y1") == "U_1");
  CHECK(split.exogenous_parent("Y2") == "U_2");
  CHECK(split.variable("U_1").domain_size == 4);
  CHECK(split.variable("U_2").domain_size == 4);
  CHECK_THROWS_AS((void)exogenous_split(chain_skeleton(), "U0"), ModelError);
}

TEST_CASE("state mapping of the chain") {
  const auto mapping = chain_mapping();
  CHECK(mapping.forbidden == testing::kForbiddenMergedStates);
  CHECK(mapping.groups.size() == 12);
  CHECK(mapping.groups.at(0) == std::vector<int>{0, 1});
  std::size_t covered = 0;
  for (const auto& [state, members] : mapping.groups) covered += members.size();
  CHECK(covered == 16);
}

TEST_CASE("mapping a vertex spreads group mass over each member") {
  const auto mapping = chain_mapping();
  std::vector<double> only_zero(16, 0.0);
  only_zero[0] = 1.0;
  const auto two = map_extreme_points(merged_set({only_zero}), mapping, "U", 16);
  REQUIRE(two.points.size() == 2);
  CHECK(two.points[0].probabilities[1] == 1.0);
  CHECK(two.points[1].probabilities[0] == 1.0);

  std::vector<int> single;
  for (const auto& [state, members] : mapping.groups)
    if (members.size() == 1) single.push_back(state);
  REQUIRE(single.size() >= 2);
  std::vector<double> singletons(16, 0.0);
  singletons[static_cast<std::size_t>(single[0])] = 0.4;
  singletons[static_cast<std::size_t>(single[1])] = 0.6;
  CHECK(map_extreme_points(merged_set({singletons}), mapping, "U", 16).points.size() == 1);

  std::vector<double> forbidden(16, 0.0);
  forbidden[4] = 1.0;
  CHECK_THROWS_AS((void)map_extreme_points(merged_set({forbidden}), mapping, "U", 16), Error);
}

TEST_CASE("restricted merged search reproduces the direct observational intervals") {
  const auto skeleton = chain_skeleton();
  for (std::size_t i = 0; i < 15; ++i) {
    const auto inst = generate_instance(instance_seed(31, i));
    const auto direct = solve_credal(skeleton, inst.evidence, Regime::s_o);
    auto via = direct;
    via.at("U") = solve_via_merge(skeleton, inst.evidence, "U");
    const auto system = build_system(skeleton, inst.evidence, "U", Regime::s_o);
    for (const auto& p : via.at("U").points) CHECK(system.residual(p.probabilities) <= 1e-7);
    for (const auto& q : default_queries()) {
      const auto a = bound_query(direct, skeleton, q);
      const auto b = bound_query(via, skeleton, q);
      CHECK(a.lower == doctest::Approx(b.lower).epsilon(1e-9));
      CHECK(a.upper == doctest::Approx(b.upper).epsilon(1e-9));
    }
  }
}

TEST_CASE("approximations contain or miss the exact interval as expected") {
  const auto skeleton = chain_skeleton();
  const auto inst = generate_instance(instance_seed(8, 3));
  const auto exact = solve_approach(skeleton, inst.evidence, Approach::s_o);
  const auto mm = solve_approach(skeleton, inst.evidence, Approach::mm_o);
  const auto q = Query::parse("pns:X:Y2");
  const auto a = bound_query(exact.solutions, exact.model, q);
  const auto b = bound_query(mm.solutions, mm.model, q);
  CHECK(b.lower <= a.lower + 1e-9);
  CHECK(b.upper >= a.upper - 1e-9);
  CHECK_THROWS_AS((void)bound_query(mm.solutions, mm.model, Query::parse("pns:Y1:Y2")), NotComputable);
}
