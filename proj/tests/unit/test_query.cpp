#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/learning.hpp"
#include "stagedtrees/query.hpp"

using namespace stagedtrees;

namespace {

StagedTree mod1() { return stndnaming(stages_hc(indep(titanic()))); }

Path path(std::initializer_list<const char*> items) { return Path(items.begin(), items.end()); }

}  // namespace

TEST_CASE("probabilities of Titanic events") {
  const auto f = full(titanic());
  CHECK(prob(f, Assignment{}) == doctest::Approx(1.0));
  CHECK(prob(f, {{"Survived", "Yes"}}) == doctest::Approx(711.0 / 2201.0).epsilon(1e-12));
  CHECK(prob(f, {{"Class", "Crew"}, {"Age", "Child"}}) == 0.0);
  CHECK(std::isinf(prob(f, {{"Class", "Crew"}, {"Age", "Child"}}, true)));
  CHECK(prob(f, {{"Survived", "Yes"}}, true) == doctest::Approx(std::log(711.0 / 2201.0)));
  CHECK_THROWS_AS(prob(f, {{"Deck", "A"}}), ValidationError);
  CHECK_THROWS_AS(prob(f, {{"Class", "4th"}}), ValidationError);
}

TEST_CASE("queries on the hill-climbed Titanic model") {
  const auto m = mod1();
  CHECK(prob(m, {{"Survived", "Yes"}}) == doctest::Approx(0.3236376).epsilon(1e-7));
  CHECK(prob(m, {{"Survived", "Yes"}, {"Age", "Adult"}}) / prob(m, {{"Age", "Adult"}}) ==
        doctest::Approx(0.3165252).epsilon(1e-7));
  CHECK(prob(m, {{"Survived", "Yes"}, {"Age", "Child"}}) / prob(m, {{"Age", "Child"}}) ==
        doctest::Approx(0.4584954).epsilon(1e-7));
  const auto crew_female = path({"Crew", "Female"});
  CHECK(get_stage(m, crew_female) == "2");
  CHECK(get_path(m, "Survived", "3") == std::vector<Path>{path({"2nd", "Male", "Adult"}), path({"3rd", "Male", "Adult"})});
  const auto s1 = get_path(m, "Survived", "1");
  CHECK(s1.size() == 5);
  CHECK(std::find(s1.begin(), s1.end(), path({"1st", "Female", "Adult"})) != s1.end());
  const auto crew_child = path({"Crew", "Male", "Child"});
  CHECK(get_stage(m, crew_child) == "na");
}

TEST_CASE("atomic probabilities") {
  const auto m = mod1();
  const auto atoms = atomic_probs(m);
  CHECK(atoms.size() == 32);
  const std::vector<std::size_t> crew_male_adult_no{3, 0, 1, 0};
  for (const auto& a : atoms) {
    if (a.levels == crew_male_adult_no) CHECK(a.prob == doctest::Approx(0.303119).epsilon(1e-6));
    if (a.levels[0] == 3 && a.levels[2] == 0) CHECK(a.prob == 0.0);
  }
  const auto want = oracle::leaf_probs(m);
  for (std::size_t i = 0; i < atoms.size(); ++i) CHECK(atoms[i].prob == doctest::Approx(want[i]).epsilon(1e-14));

  // Without reachable unobserved stages the atoms sum to one.
  double total = 0.0;
  for (const auto& a : atomic_probs(full(titanic()))) total += a.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independence atoms are products of the single stage per stratum") {
  const auto i = indep(titanic());
  for (const auto& a : atomic_probs(i)) {
    // Crew children sit below an unobserved stage.
    if (a.levels[0] == 3 && a.levels[2] == 0) {
      CHECK(a.prob == 0.0);
      continue;
    }
    double p = 1.0;
    for (std::size_t d = 0; d < 4; ++d) p *= (*i.stage(d, "1").probs)[a.levels[d]];
    CHECK(a.prob == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("prob matches leaf enumeration and is additive up to the deepest constraint") {
  std::mt19937_64 gen(13);
  for (int rep = 0; rep < 60; ++rep) {
    const auto pr = oracle::random_problem(gen);
    const auto& m = pr.model;
    const auto& tree = m.tree();
    const auto k = oracle::cards(tree);
    const auto leaves = oracle::leaf_probs(m);
    std::uniform_int_distribution<int> coin(0, 2);
    LevelPattern pattern(tree.size(), static_cast<std::size_t>(-1));
    std::size_t deepest = 0;
    for (std::size_t d = 0; d < tree.size(); ++d) {
      if (coin(gen) == 0) {
        pattern[d] = std::uniform_int_distribution<std::size_t>(0, k[d] - 1)(gen);
        deepest = d + 1;
      }
    }
    // Oracle: sum the leaves matching the pattern, treating the variables
    // below the deepest constraint as summed out within their florets.
    double want = 0.0;
    if (deepest == tree.size() || deepest == 0) {
      for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
        const auto x = oracle::leaf_levels(k, leaf);
        bool match = true;
        for (std::size_t d = 0; d < tree.size(); ++d) match = match && (pattern[d] == static_cast<std::size_t>(-1) || pattern[d] == x[d]);
        if (match) want += leaves[leaf];
      }
      if (deepest == 0) want = 1.0;
      CHECK(prob(m, pattern) == doctest::Approx(want).epsilon(1e-12));
    }
    // Refining by a variable at or above the deepest constraint splits the mass.
    for (std::size_t e = 0; e < std::max<std::size_t>(deepest, 1); ++e) {
      if (pattern[e] != static_cast<std::size_t>(-1)) continue;
      double parts = 0.0;
      for (std::size_t j = 0; j < k[e]; ++j) {
        auto refined = pattern;
        refined[e] = j;
        parts += prob(m, refined);
      }
      if (deepest > 0) CHECK(parts == doctest::Approx(prob(m, pattern)).epsilon(1e-12));
    }
  }
}

TEST_CASE("refining below the deepest constraint loses exactly the unobserved mass") {
  const auto m = mod1();
  const double child = prob(m, {{"Age", "Child"}});
  const double split = prob(m, {{"Age", "Child"}, {"Survived", "No"}}) + prob(m, {{"Age", "Child"}, {"Survived", "Yes"}});
  const double lost = prob(m, {{"Class", "Crew"}, {"Age", "Child"}});
  CHECK(lost > 0.0);
  CHECK(split == doctest::Approx(child - lost).epsilon(1e-12));
}

TEST_CASE("saturated models reproduce cell frequencies") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 30; ++rep) {
    const auto tree = oracle::random_tree(gen);
    const auto ds = oracle::random_data(gen, tree);
    const auto f = full(ds);
    for (const auto& a : atomic_probs(f)) {
      CHECK(a.prob == doctest::Approx(ds.cell(a.levels) / ds.total()).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling") {
  const auto f = full(titanic());
  CHECK(sample_from(f, 0, 1).empty());
  CHECK(sample_from(f, 50, 3) == sample_from(f, 50, 3));
  CHECK(sample_from(f, 50, 3) != sample_from(f, 50, 4));
  const auto big = sample_from(f, 100000, 9);
  double yes = 0;
  for (const auto& r : big) yes += r[3] == 1;
  CHECK(std::abs(yes / 100000.0 - 711.0 / 2201.0) < 0.01);

  // No sample passes an unobserved stage, even when one is reachable.
  const auto m = mod1();
  for (const auto& r : sample_from(m, 20000, 5)) CHECK_FALSE((r[0] == 3 && r[2] == 0));
}

TEST_CASE("a one-hot model always samples the same path") {
  EventTree t({{"A", {"a", "b"}}, {"B", {"x", "y", "z"}}});
  auto st = staged_tree_from_labels(t, {{"1"}, {"1", "1"}});
  auto strata = st.strata();
  strata[0].stages.at("1").probs = std::vector<double>{0.0, 1.0};
  strata[1].stages.at("1").probs = std::vector<double>{0.0, 0.0, 1.0};
  const StagedTree m(t, strata, 0.0, "na", true);
  for (const auto& r : sample_from(m, 100, 2)) CHECK(r == Record{1, 2});
}

TEST_CASE("get_stage and get_path errors") {
  const auto m = mod1();
  const Path empty;
  CHECK_THROWS_AS(get_stage(m, empty), ValidationError);
  CHECK_THROWS_AS(get_stage(m, path({"Crew", "Male", "Adult", "No"})), ValidationError);
  CHECK_THROWS_AS(get_stage(m, path({"Crew", "Robot"})), ValidationError);
  CHECK_THROWS_AS(get_path(m, "Survived", "42"), ValidationError);
  CHECK_THROWS_AS(get_path(m, "Class", "1"), ValidationError);
}

TEST_CASE("get_path and get_stage are inverse on every stage") {
  const auto m = mod1();
  for (std::size_t d = 1; d < 4; ++d) {
    for (const auto& id : m.stages_in_order(d)) {
      for (const auto& p : get_path(m, m.tree().variable(d).name, id)) CHECK(get_stage(m, p) == id);
    }
  }
}

TEST_CASE("subtree restricts the model below a prefix") {
  const auto m = mod1();
  const auto crew = path({"Crew"});
  const auto sub = subtree(m, crew);
  CHECK(sub.tree().describe() == "Sex[2] -> Age[2] -> Survived[2]");
  // Conditional consistency against the parent model.
  const double p_crew = prob(m, {{"Class", "Crew"}});
  for (const auto& a : atomic_probs(sub)) {
    Assignment full_event{{"Class", "Crew"}};
    for (std::size_t d = 0; d < 3; ++d) full_event[sub.tree().variable(d).name] = sub.tree().variable(d).levels[a.levels[d]];
    CHECK(a.prob == doctest::Approx(prob(m, full_event) / p_crew).epsilon(1e-12));
  }
  const Path none;
  CHECK(subtree(m, none) == m);
  CHECK_THROWS_AS(subtree(m, path({"Crew", "Male", "Child"})), ValidationError);
}

TEST_CASE("stndnaming renumbers by first member and is idempotent") {
  const auto raw = stages_hc(indep(titanic()));
  const auto m = stndnaming(raw);
  CHECK(stndnaming(m) == m);
  CHECK(compare_stages(raw, m).equal);
  CHECK(m.stages_in_order(3) == std::vector<StageId>{"1", "2", "3", "4", "5", "na"});
  CHECK(m.observed_stages(3) == std::vector<StageId>{"1", "2", "3", "4", "5"});
}

TEST_CASE("summary rows") {
  const auto m = mod1();
  const auto s = summary(m);
  REQUIRE(s.size() == 4);
  CHECK(s[0].rows.at(0).npaths == 0);
  CHECK(s[0].rows.at(0).sample_size == 2201);
  const auto& sex = s[1].rows;
  REQUIRE(sex.size() == 3);
  CHECK(sex[2].sample_size == 885);
  CHECK((*sex[2].probs)[0] == doctest::Approx(0.9740113).epsilon(1e-7));
  CHECK((*sex[2].probs)[1] == doctest::Approx(0.0259887).epsilon(1e-6));
  const auto& surv = s[3].rows;
  CHECK(surv.back().stage == "na");
  CHECK(surv.back().npaths == 2);
  CHECK(surv.back().sample_size == 0);
  CHECK_FALSE(surv.back().probs.has_value());
  const auto text = format_summary(m);
  CHECK(text.find("885\t0.9740113\t0.0259887") != std::string::npos);
  CHECK(text.find("na\t2\t0\tNA\tNA") != std::string::npos);

  const auto i = summary(indep(titanic()));
  CHECK(i[1].rows.size() == 1);
  CHECK(i[1].rows[0].sample_size == 2201);
}

TEST_CASE("compare_stages") {
  const auto ds = titanic();
  const auto mod1 = stages_hc(indep(ds));
  const auto mod3 = stages_hc(stages_bj(full(ds)));
  const auto self = compare_stages(mod1, mod1);
  CHECK(self.equal);
  CHECK(self.diff.empty());
  const auto c = compare_stages(mod1, mod3);
  CHECK_FALSE(c.equal);
  CHECK(c.diff.vertices[0].empty());
  CHECK(c.diff.vertices[1].empty());
  CHECK_FALSE(c.diff.vertices[2].empty());
  CHECK(c.diff.vertices[3].empty());
  CHECK(compare_stages(mod3, mod1).diff.vertices == c.diff.vertices);
  for (auto method : {CompareMethod::naive, CompareMethod::hamming}) {
    CHECK(compare_stages(mod1, mod1, method).equal);
    CHECK(compare_stages(mod1, stndnaming(mod1), method).equal);
  }
  CHECK_FALSE(compare_stages(mod1, mod3, CompareMethod::hamming).equal);
  const std::vector<std::string> order{"Sex", "Class", "Age", "Survived"};
  CHECK_THROWS_AS(compare_stages(mod1, full(ds.reordered(order))), ValidationError);
}

TEST_CASE("naive comparison only looks at stage sizes") {
  EventTree t({{"A", {"a", "b", "c"}}, {"B", {"x", "y"}}});
  const auto a = staged_tree_from_labels(t, {{"1"}, {"1", "1", "2"}});
  const auto b = staged_tree_from_labels(t, {{"1"}, {"1", "2", "2"}});
  const auto c = staged_tree_from_labels(t, {{"1"}, {"1", "2", "3"}});
  CHECK(compare_stages(a, b, CompareMethod::naive).equal);
  CHECK(compare_stages(a, b, CompareMethod::naive).diff.empty());
  CHECK_FALSE(compare_stages(a, b, CompareMethod::stages).equal);
  const auto ac = compare_stages(a, c, CompareMethod::naive);
  CHECK_FALSE(ac.equal);
  CHECK(ac.diff.vertices[1] == std::vector<std::size_t>{0, 1});
}
