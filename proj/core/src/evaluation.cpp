#include "stagedtrees/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/format.hpp"
#include "stagedtrees/predict.hpp"
#include "stagedtrees/random.hpp"

namespace stagedtrees {

InitKind parse_init(std::string_view name) {
  if (name == "full") return InitKind::full;
  if (name == "indep") return InitKind::indep;
  throw ValidationError("unknown initial model '" + std::string(name) + "'");
}

InitKind default_init(Algorithm alg) { return alg == Algorithm::hc ? InitKind::indep : InitKind::full; }

Evaluation evaluate(const Dataset& data, const EvalConfig& cfg) {
  if (cfg.splits == 0) throw ValidationError("at least one split is required");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  const auto records = data.to_records();
  const std::size_t n = records.size();
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ValidationError("dataset of " + std::to_string(n) + " records is too small to split");
  }
  const InitKind init = cfg.init.value_or(default_init(cfg.algorithm));
  const auto class_name = data.tree().variable(0).name;

  Evaluation ev;
  for (std::size_t s = 0; s < cfg.splits; ++s) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(derive_seed(cfg.seed, s));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
    std::vector<Record> train, test;
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(records[idx[i]]);

    const auto train_ds = Dataset::from_records(data.tree(), train);
    InitOptions opts;
    opts.lambda = cfg.lambda;
    opts.join_unobserved = cfg.join_unobserved;
    const auto start_model = init == InitKind::full ? full(train_ds, opts) : indep(train_ds, opts);
    SearchConfig search = cfg.search;
    search.seed = derive_seed(cfg.search.seed, s);
    const auto model = learn(start_model, cfg.algorithm, search);

    const auto predicted = predict(model, class_name, test);
    const auto sc = score(model);
    EvalRow row;
    row.split = s + 1;
    row.df = static_cast<double>(sc.df);
    row.loglik = sc.loglik;
    row.aic = sc.aic;
    row.bic = sc.bic;
    row.accuracy = accuracy(predicted, test, 0);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ev.rows.push_back(row);
  }
  const double m = static_cast<double>(ev.rows.size());
  for (const auto& r : ev.rows) {
    ev.mean.df += r.df / m;
    ev.mean.loglik += r.loglik / m;
    ev.mean.aic += r.aic / m;
    ev.mean.bic += r.bic / m;
    ev.mean.accuracy += r.accuracy / m;
    ev.mean.seconds += r.seconds / m;
  }
  return ev;
}

std::string evaluation_csv(const Evaluation& ev) {
  std::ostringstream os;
  os << "split,df,logLik,AIC,BIC,accuracy,seconds\n";
  auto line = [&](const std::string& label, const EvalRow& r) {
    os << label << ',' << format_fixed(r.df, r.df == std::floor(r.df) ? 0 : 1) << ',' << format_fixed(r.loglik, 3)
       << ',' << format_fixed(r.aic, 3) << ',' << format_fixed(r.bic, 3) << ',' << format_fixed(r.accuracy, 4)
       << ',' << format_fixed(r.seconds, 4) << '\n';
  };
  for (const auto& r : ev.rows) line(std::to_string(r.split), r);
  line("mean", ev.mean);
  return os.str();
}

}  // namespace stagedtrees
