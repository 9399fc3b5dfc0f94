// Acceptance checks: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "stagedtrees/ceg.hpp"
#include "stagedtrees/datasets.hpp"
#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/evaluation.hpp"
#include "stagedtrees/learning.hpp"
#include "stagedtrees/lr_test.hpp"
#include "stagedtrees/query.hpp"

using namespace stagedtrees;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Outcome saturated_scores() {
  Outcome o;
  const auto ds = titanic();
  const auto f = full(ds);
  const auto i = indep(ds);
  o.require(near(loglik(f), -5151.517, 0.01) && df(f) == 30, "full logLik " + fmt("%.4f", loglik(f)));
  o.require(near(loglik(i), -5773.349, 0.01) && df(i) == 7, "indep logLik " + fmt("%.4f", loglik(i)));
  o.detail = o.ok ? "full " + fmt("%.3f", loglik(f)) + " df 30, indep " + fmt("%.3f", loglik(i)) + " df 7" : o.detail;
  return o;
}

Outcome root_floret() {
  Outcome o;
  const std::vector<double> want{0.1476602, 0.1294866, 0.3207633, 0.40209};
  const auto ds = titanic();
  for (const auto& m : {full(ds), indep(ds), stages_hc(indep(ds)), stages_bj(full(ds))}) {
    const auto& p = *m.stage(0, "1").probs;
    for (std::size_t j = 0; j < 4; ++j) o.require(near(p[j], want[j], 1e-6), "root prob " + fmt("%.7f", p[j]));
  }
  if (o.ok) o.detail = "same root floret under four fits";
  return o;
}

Outcome hill_climb() {
  Outcome o;
  const auto m = stages_hc(indep(titanic()));
  const double b = bic(m), a = aic(m);
  o.require(df(m) == 15, "df " + std::to_string(df(m)));
  o.require(b <= 10450.0, "BIC " + fmt("%.4f", b));
  o.detail = "df " + std::to_string(df(m)) + ", BIC " + fmt("%.4f", b) + ", AIC " + fmt("%.4f", a) +
             (near(b, 10449.94, 0.1) && near(a, 10364.49, 0.1) ? " (exact)" : " (inequality)") +
             (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome backward_join() {
  Outcome o;
  const auto m = stages_bj(full(titanic()));
  o.require(df(m) == 15, "df " + std::to_string(df(m)));
  o.detail = "df " + std::to_string(df(m)) + (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome saturated_identity() {
  Outcome o;
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = oracle::random_tree(gen);
    const auto ds = oracle::random_data(gen, t);
    const auto f = full(ds);
    const auto k = oracle::cards(t);
    for (std::size_t leaf = 0; leaf < t.num_leaves(); ++leaf) {
      const auto x = oracle::leaf_levels(k, leaf);
      worst = std::max(worst, std::abs(prob(f, x) - ds.cell(x) / ds.total()));
    }
  }
  o.require(worst <= 1e-12, "max error " + fmt("%.3g", worst));
  o.detail = "200 datasets, max error " + fmt("%.3g", worst);
  return o;
}

Outcome oracle_scores() {
  Outcome o;
  const EventTree t({{"X1", {"0", "1"}}, {"X2", {"0", "1"}}, {"X3", {"0", "1"}}});
  const Dataset ds(t, {7, 3, 1, 9, 4, 4, 12, 2});
  std::size_t n = 0;
  double worst = 0.0;
  for (const auto& p1 : oracle::set_partitions(2, 3)) {
    for (const auto& p2 : oracle::set_partitions(4, 3)) {
      std::vector<std::vector<StageId>> labels{{"1"}, {}, {}};
      for (auto b : p1) labels[1].push_back(std::to_string(b + 1));
      for (auto b : p2) labels[2].push_back(std::to_string(b + 1));
      for (double lambda : {0.0, 0.5}) {
        const auto m = fit(staged_tree_from_labels(t, labels), ds, lambda);
        const auto want = oracle::scores(ds, labels, lambda, "na");
        const auto got = score(m);
        worst = std::max({worst, std::abs(got.loglik - want.loglik), std::abs(got.aic - want.aic),
                          std::abs(got.bic - want.bic)});
        o.require(got.df == want.df, "df mismatch");
        ++n;
      }
    }
  }
  o.require(worst <= 1e-9, "max error " + fmt("%.3g", worst));
  o.detail = std::to_string(n) + " stagings, max error " + fmt("%.3g", worst) + (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome monotonicity() {
  Outcome o;
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = oracle::random_problem(gen);
    SearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(rep);
    const double before = search_score(p.model, cfg.score);
    for (auto alg : {Algorithm::hc, Algorithm::bhc, Algorithm::fbhc, Algorithm::bhcr}) {
      const double after = search_score(learn(p.model, alg, cfg), cfg.score);
      o.require(after >= before - 1e-9, algorithm_name(alg) + " lost score");
    }
    SearchConfig zero;
    zero.thr = 0.0;
    o.require(stages_bj(p.model, zero) == p.model, "bj thr 0 changed the model");
  }
  if (o.ok) o.detail = "100 random models";
  return o;
}

Outcome ceg_preservation() {
  Outcome o;
  std::mt19937_64 gen(99);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = oracle::random_problem(gen);
    const auto c = ceg(p.model);
    for (const auto& a : atomic_probs(p.model)) {
      worst = std::max(worst, std::abs(ceg_path_probability(c, a.levels) - prob(p.model, a.levels)));
    }
  }
  o.require(worst <= 1e-12, "max error " + fmt("%.3g", worst));

  const EventTree t({{"X1", {"0", "1"}}, {"X2", {"0", "1"}}, {"X3", {"0", "1"}}});
  const Dataset ds(t, {3, 1, 4, 1, 5, 9, 2, 6});
  const auto fig1 = positions(fit(staged_tree_from_labels(t, {{"1"}, {"1", "2"}, {"1", "1", "2", "2"}}), ds, 0.0));
  const auto fig2 = positions(fit(staged_tree_from_labels(t, {{"1"}, {"1", "1"}, {"1", "2", "2", "1"}}), ds, 0.0));
  o.require(fig1[1] == std::vector<std::size_t>{0, 1} && fig1[2] == std::vector<std::size_t>{0, 0, 1, 1},
            "context-free staging positions");
  o.require(fig2[1] == std::vector<std::size_t>{0, 1} && fig2[2] == std::vector<std::size_t>{0, 1, 1, 0},
            "crossed staging positions");
  o.detail = "100 models, max error " + fmt("%.3g", worst) + (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome recovery() {
  Outcome o;
  const EventTree t({{"X1", {"0", "1"}}, {"X2", {"0", "1"}}, {"X3", {"0", "1"}}});
  auto truth = as_staged_tree_from_bn(t, {{"X2", {"X1"}}, {"X3", {"X1"}}});
  auto strata = truth.strata();
  strata[0].stages.at("1").probs = std::vector<double>{0.4, 0.6};
  strata[1].stages.at("1").probs = std::vector<double>{0.3, 0.7};
  strata[1].stages.at("2").probs = std::vector<double>{0.8, 0.2};
  strata[2].stages.at("1").probs = std::vector<double>{0.25, 0.75};
  strata[2].stages.at("2").probs = std::vector<double>{0.7, 0.3};
  truth = StagedTree(t, strata, 0.0, "na", true);
  const auto ds = Dataset::from_records(t, sample_from(truth, 5000, 1));
  const auto m = stndnaming(stages_hc(full(ds)));
  const auto& x3 = m.stratum(2).vertex_stage;
  o.require(x3 == std::vector<StageId>{"1", "1", "2", "2"}, "X3 staging " + x3[0] + x3[1] + x3[2] + x3[3]);
  if (o.ok) o.detail = "X3 stages {v3,v4},{v5,v6}";
  return o;
}

Outcome evaluation() {
  Outcome o;
  EvalConfig cfg;
  const std::vector<std::string> order{"Survived", "Class", "Sex", "Age"};
  const auto t = evaluate(titanic().reordered(order), cfg).mean.accuracy;
  const auto a = evaluate(asym(), cfg).mean.accuracy;
  o.require(near(t, 0.7934, 0.02), "Titanic accuracy");
  o.require(near(a, 0.8490, 0.02), "Asym accuracy");
  o.detail = "Titanic " + fmt("%.4f", t) + ", Asym " + fmt("%.4f", a) + (o.ok ? "" : "; " + o.detail);
  return o;
}

Outcome lr_machinery() {
  Outcome o;
  const double q = chisq_upper_tail(3.841459, 1);
  o.require(near(q, 0.05, 1e-6), "tail " + fmt("%.9f", q));
  o.require(near(q, oracle::gamma_q_series(0.5, 3.841459 / 2.0), 1e-10), "disagrees with series oracle");
  const auto ds = titanic();
  bool rejected = false;
  try {
    lr_test(stages_bj(full(ds)), stages_hc(indep(ds)));
  } catch (const ValidationError&) {
    rejected = true;
  }
  o.require(rejected, "non-nested pair accepted");
  o.detail = "tail " + fmt("%.9f", q) + (o.ok ? ", non-nested rejected" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"Titanic saturated and independence fits", 1.0, saturated_scores},
      {"Titanic root floret", 1.0, root_floret},
      {"hill climbing from independence", 5.0, hill_climb},
      {"backward joining by distance", 2.0, backward_join},
      {"saturated frequency identity", 0.0, saturated_identity},
      {"brute-force score oracle", 0.0, oracle_scores},
      {"search monotonicity", 0.0, monotonicity},
      {"chain event graph preservation", 0.0, ceg_preservation},
      {"staging recovery from samples", 5.0, recovery},
      {"train/test evaluation", 30.0, evaluation},
      {"likelihood-ratio machinery", 0.0, lr_machinery},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0.0 && secs >= c.limit) {
      o.ok = false;
      o.detail += "; over the " + fmt("%.0f", c.limit) + " s limit";
    }
    std::printf("%s %2zu %s: %s [%.3f s]\n", o.ok ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs);
    failed += !o.ok;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
