#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/learning.hpp"

namespace stagedtrees {

enum class InitKind { full, indep };
InitKind parse_init(std::string_view name);

struct EvalConfig {
  Algorithm algorithm = Algorithm::bhc;
  /// Defaults to indep for hc and full for every other algorithm.
  std::optional<InitKind> init;
  SearchConfig search;
  std::size_t splits = 10;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  bool join_unobserved = true;
};

struct EvalRow {
  std::size_t split = 0;
  double df = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double accuracy = 0.0;
  double seconds = 0.0;
};

struct Evaluation {
  std::vector<EvalRow> rows;
  EvalRow mean;
};

InitKind default_init(Algorithm alg);

/// Repeated train/test evaluation with the first variable as the class.
/// Split s shuffles the records with Rng(derive_seed(seed, s)), trains on the
/// first round(train_fraction * n) and tests on the rest; searches that use
/// randomness get derive_seed(search.seed, s).
Evaluation evaluate(const Dataset& data, const EvalConfig& cfg);

/// CSV with columns split,df,logLik,AIC,BIC,accuracy,seconds and a final
/// "mean" row.
std::string evaluation_csv(const Evaluation& ev);

}  // namespace stagedtrees
