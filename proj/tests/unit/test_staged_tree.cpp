#include <doctest.h>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/staged_tree.hpp"

using namespace stagedtrees;

namespace {

EventTree three_binary() { return EventTree({{"X1", {"0", "1"}}, {"X2", {"0", "1"}}, {"X3", {"0", "1"}}}); }

}  // namespace

TEST_CASE("labels build a staged tree with stages in first-member order") {
  const auto st = staged_tree_from_labels(three_binary(), {{"1"}, {"a", "b"}, {"z", "y", "z", "y"}});
  CHECK(st.observed_stages(2) == std::vector<StageId>{"z", "y"});
  CHECK(st.members(2, "y") == std::vector<std::size_t>{1, 3});
  CHECK(st.stage_of({2, 2}) == "z");
  CHECK_FALSE(st.fitted());
}

TEST_CASE("the root must stay out of the unobserved stage") {
  CHECK_THROWS_AS(staged_tree_from_labels(three_binary(), {{"na"}, {"1", "1"}, {"1", "1", "1", "1"}}),
                  ValidationError);
}

TEST_CASE("probabilities must be distributions") {
  auto st = staged_tree_from_labels(three_binary(), {{"1"}, {"1", "1"}, {"1", "1", "1", "1"}});
  auto strata = st.strata();
  for (auto& s : strata) s.stages.at("1").probs = std::vector<double>{0.5, 0.5};
  CHECK_NOTHROW(StagedTree(st.tree(), strata, 0.0, "na", true));
  strata[1].stages.at("1").probs = std::vector<double>{0.6, 0.5};
  CHECK_THROWS_AS(StagedTree(st.tree(), strata, 0.0, "na", true), ValidationError);
  strata[1].stages.at("1").probs = std::vector<double>{1.1, -0.1};
  CHECK_THROWS_AS(StagedTree(st.tree(), strata, 0.0, "na", true), ValidationError);
  strata[1].stages.at("1").probs.reset();
  CHECK_THROWS_AS(StagedTree(st.tree(), strata, 0.0, "na", true), ValidationError);
}

TEST_CASE("stage counts must equal the sum over members") {
  auto st = staged_tree_from_labels(three_binary(), {{"1"}, {"1", "1"}, {"1", "1", "1", "1"}});
  auto strata = st.strata();
  strata[1].vertex_counts = {1, 2, 3, 4};
  strata[1].stages.at("1").counts = {4, 6};
  CHECK_NOTHROW(StagedTree(st.tree(), strata));
  strata[1].stages.at("1").counts = {4, 7};
  CHECK_THROWS_AS(StagedTree(st.tree(), strata), ValidationError);
}

TEST_CASE("a BN compiles to one stage per parent configuration") {
  // X1 -> X2, X1 -> X3: X3 depends on X1 only.
  const auto st = as_staged_tree_from_bn(three_binary(), {{"X2", {"X1"}}, {"X3", {"X1"}}});
  CHECK(st.stratum(2).vertex_stage == std::vector<StageId>{"1", "1", "2", "2"});
  CHECK(st.stratum(1).vertex_stage == std::vector<StageId>{"1", "2"});
  CHECK_FALSE(st.has_unobserved(2));

  const auto indep = as_staged_tree_from_bn(three_binary(), {});
  CHECK(indep.observed_stages(2).size() == 1);

  const auto x3_on_x2 = as_staged_tree_from_bn(three_binary(), {{"X3", {"X2"}}});
  CHECK(x3_on_x2.stratum(2).vertex_stage == std::vector<StageId>{"1", "2", "1", "2"});

  CHECK_THROWS_AS(as_staged_tree_from_bn(three_binary(), {{"X1", {"X3"}}}), ValidationError);
}

TEST_CASE("BN stage count is the product of parent cardinalities") {
  EventTree t({{"A", {"a", "b", "c"}}, {"B", {"x", "y"}}, {"C", {"p", "q"}}, {"D", {"u", "v"}}});
  const auto st = as_staged_tree_from_bn(t, {{"D", {"A", "C"}}, {"C", {"B"}}});
  CHECK(st.observed_stages(3).size() == 6);
  CHECK(st.observed_stages(2).size() == 2);
  CHECK(st.observed_stages(1).size() == 1);
}

TEST_CASE("fresh labels skip taken and reserved names") {
  std::map<StageId, Stage> taken{{"1", {}}, {"2", {}}, {"4", {}}};
  CHECK(fresh_stage_label(taken, "na") == "3");
  taken["3"] = {};
  CHECK(fresh_stage_label(taken, "5") == "6");
}
