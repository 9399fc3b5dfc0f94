#include <doctest.h>

#include "oracles.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/errors.hpp"
#include "stagedtrees/evaluation.hpp"
#include "stagedtrees/predict.hpp"
#include "stagedtrees/query.hpp"

using namespace stagedtrees;

TEST_CASE("Titanic table") {
  const auto ds = titanic();
  CHECK(ds.tree().describe() == "Class[4] -> Sex[2] -> Age[2] -> Survived[2]");
  CHECK(ds.total() == 2201);
  CHECK(ds.cell(std::vector<std::size_t>{3, 0, 1, 0}) == 670);
  CHECK(ds.cell(std::vector<std::size_t>{0, 1, 1, 1}) == 140);
  CHECK(ds.cell(std::vector<std::size_t>{3, 0, 0, 0}) == 0);
}

TEST_CASE("the Bayes classifier of the asymmetric model") {
  const auto m = asym_model();
  const auto k = oracle::cards(m.tree());
  const auto leaves = oracle::leaf_probs(m);
  double total = 0.0, majority = 0.0;
  for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
    total += leaves[leaf];
    if (oracle::leaf_levels(k, leaf)[0] == 0) majority += leaves[leaf];
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(majority == doctest::Approx(0.7));

  std::vector<Record> rows;
  for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) rows.push_back(oracle::leaf_levels(k, leaf));
  const auto pred = predict(m, "X1", rows);
  double bayes = 0.0;
  for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) bayes += pred[leaf] == rows[leaf][0] ? leaves[leaf] : 0.0;
  CHECK(bayes == doctest::Approx(0.8485).epsilon(1e-4));
}

TEST_CASE("asym samples are reproducible") {
  const auto a = asym();
  CHECK(a.total() == 1000);
  CHECK(a.tree().describe() == "X1[2] -> X2[2] -> X3[2] -> X4[2]");
  const auto b = asym();
  CHECK(std::equal(a.counts().begin(), a.counts().end(), b.counts().begin()));
  const auto c = asym(1000, 1);
  CHECK_FALSE(std::equal(a.counts().begin(), a.counts().end(), c.counts().begin()));
}

TEST_CASE("evaluation is deterministic apart from timings") {
  EvalConfig cfg;
  cfg.splits = 3;
  cfg.seed = 5;
  const auto ds = asym(300, 2);
  auto a = evaluate(ds, cfg);
  auto b = evaluate(ds, cfg);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.rows[i].split == i + 1);
    CHECK(a.rows[i].loglik == b.rows[i].loglik);
    CHECK(a.rows[i].df == b.rows[i].df);
    CHECK(a.rows[i].accuracy == b.rows[i].accuracy);
    CHECK(a.rows[i].accuracy >= 0.0);
    CHECK(a.rows[i].accuracy <= 1.0);
  }
  const auto csv = evaluation_csv(a);
  CHECK(csv.rfind("split,df,logLik,AIC,BIC,accuracy,seconds\n", 0) == 0);
  CHECK(csv.find("\nmean,") != std::string::npos);
}

TEST_CASE("evaluation rejects data too small to split") {
  EventTree t({{"C", {"a", "b"}}, {"X", {"p", "q"}}});
  EvalConfig cfg;
  CHECK_THROWS_AS(evaluate(Dataset(t, {1, 0, 0, 0}), cfg), ValidationError);
  CHECK(parse_init("indep") == InitKind::indep);
  CHECK_THROWS_AS(parse_init("empty"), ValidationError);
  CHECK(default_init(Algorithm::hc) == InitKind::indep);
  CHECK(default_init(Algorithm::bhc) == InitKind::full);
}
