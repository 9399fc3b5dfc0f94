#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/learning.hpp"
#include "stagedtrees/lr_test.hpp"
#include "stagedtrees/predict.hpp"
#include "stagedtrees/query.hpp"

using namespace stagedtrees;

namespace {

constexpr std::size_t kFree = static_cast<std::size_t>(-1);

}  // namespace

TEST_CASE("a one-variable model predicts the marginal argmax") {
  EventTree t({{"C", {"a", "b", "c"}}});
  const auto m = full(Dataset(t, {2, 5, 1}));
  const std::vector<Record> rows(3, Record{kFree});
  CHECK(predict(m, "C", rows) == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("a deterministic class is recovered exactly") {
  EventTree t({{"C", {"a", "b"}}, {"X", {"p", "q", "r"}}});
  // C = a iff X = p.
  const auto m = full(Dataset(t, {5, 0, 0, 0, 3, 4}));
  const std::vector<Record> rows{{kFree, 0}, {kFree, 1}, {kFree, 2}};
  CHECK(predict(m, "C", rows) == std::vector<std::size_t>{0, 1, 1});
}

TEST_CASE("ties go to the earlier level and unseen rows to the marginal") {
  EventTree t({{"X", {"p", "q", "r"}}, {"C", {"a", "b"}}});
  const auto m = full(Dataset(t, {2, 2, 1, 3, 0, 0}));
  const std::vector<Record> rows{{0, kFree}, {1, kFree}, {2, kFree}};
  CHECK(predict(m, "C", rows) == std::vector<std::size_t>{0, 1, 1});
}

TEST_CASE("predictions maximise the joint probability") {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = oracle::random_problem(gen);
    const auto& tree = p.model.tree();
    if (tree.size() < 2) continue;
    const std::size_t c = tree.size() - 1;
    std::vector<Record> rows;
    for (std::size_t leaf = 0; leaf < tree.num_leaves(); leaf += tree.cardinality(c)) {
      auto r = tree.decode_levels({tree.size(), leaf});
      r[c] = kFree;
      rows.push_back(r);
    }
    const auto pred = predict(p.model, tree.variable(c).name, rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto r = rows[i];
      r[c] = pred[i];
      const double chosen = path_probability(p.model, r);
      for (std::size_t j = 0; j < tree.cardinality(c); ++j) {
        r[c] = j;
        CHECK(chosen >= path_probability(p.model, r));
      }
    }
  }
}

TEST_CASE("accuracy counts matching class entries") {
  const std::vector<Record> rows{{0, 1}, {1, 1}, {0, 0}, {1, 0}};
  const std::vector<std::size_t> pred{0, 0, 0, 1};
  CHECK(accuracy(pred, rows, 0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(accuracy(std::vector<std::size_t>{}, std::vector<Record>{}, 0), ValidationError);
}

TEST_CASE("chi-square tail against independent oracles") {
  CHECK(chisq_upper_tail(3.841459, 1) == doctest::Approx(std::erfc(std::sqrt(3.841459 / 2.0))).epsilon(1e-12));
  CHECK(std::abs(chisq_upper_tail(3.841459, 1) - 0.05) < 1e-6);
  for (double df : {1.0, 2.0, 3.0, 5.0, 10.0}) {
    for (double x : {0.5, 1.0, 3.0, 7.5, 15.0}) {
      CHECK(chisq_upper_tail(x, df) == doctest::Approx(oracle::gamma_q_series(df / 2.0, x / 2.0)).epsilon(1e-10));
      CHECK(chisq_upper_tail(x, df) == doctest::Approx(oracle::chisq_tail_quadrature(x, df)).epsilon(1e-7));
    }
    CHECK(chisq_upper_tail(0.0, df) == 1.0);
    CHECK(chisq_upper_tail(1e6, df) == doctest::Approx(0.0));
  }
  // chi2 with 2 df has tail exp(-x/2).
  CHECK(chisq_upper_tail(4.0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  double prev = 1.0;
  for (double x = 0.0; x < 30.0; x += 0.25) {
    const double q = chisq_upper_tail(x, 4);
    CHECK(q <= prev);
    prev = q;
  }
  CHECK_THROWS_AS(chisq_upper_tail(1.0, 0), ValidationError);
  CHECK_THROWS_AS(chisq_upper_tail(-1.0, 2), ValidationError);
}

TEST_CASE("likelihood-ratio test of nested Titanic models") {
  const auto ds = titanic();
  const auto f = full(ds);
  const auto i = indep(ds);
  const auto m = stages_hc(i);
  const auto r = lr_test(i, f);
  CHECK(r.df == 23);
  CHECK(r.stat == doctest::Approx(2 * (loglik(f) - loglik(i))));
  CHECK(r.p_value < 1e-100);
  CHECK(lr_test(m, f).df == 15);
  CHECK_THROWS_AS(lr_test(f, f), ValidationError);
  CHECK_THROWS_AS(lr_test(f, i), ValidationError);
  // bj output is not a coarsening of the hc output.
  CHECK_THROWS_AS(lr_test(stages_bj(f), m), ValidationError);
}

TEST_CASE("a zero statistic has p-value one") {
  EventTree t({{"A", {"a", "b"}}, {"B", {"x", "y"}}});
  const auto ds = Dataset(t, {1, 3, 2, 6});
  const auto r = lr_test(indep(ds), full(ds));
  CHECK(r.stat == doctest::Approx(0.0).scale(1.0));
  CHECK(r.p_value == doctest::Approx(1.0));
}
