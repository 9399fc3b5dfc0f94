#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

struct ModelScore {
  double loglik = 0.0;
  long df = 0;
  double aic = 0.0;
  double bic = 0.0;
  double n = 0.0;
};

struct InitOptions {
  std::optional<std::vector<std::string>> order;
  bool join_unobserved = true;
  double lambda = 0.0;
  std::string name_unobserved = kDefaultUnobserved;
};

/// Saturated model: every observed vertex in its own stage, fitted.
StagedTree full(const Dataset& ds, const InitOptions& options = {});

/// Independence model: one observed stage per stratum, fitted.
StagedTree indep(const Dataset& ds, const InitOptions& options = {});

/// Moves every vertex whose path count is zero into its stratum's `name`
/// stage. Probabilities of the remaining stages are kept.
StagedTree collapse_unobserved(const StagedTree& st, const Dataset& ds,
                               const std::string& name = kDefaultUnobserved);

/// Attaches the data and estimates each observed stage by
/// p_j = (n_j + lambda) / (m + lambda k).
StagedTree fit(const StagedTree& st, const Dataset& ds, double lambda = 0.0);

/// Re-estimates probabilities from the stage counts already stored in `st`.
StagedTree refit(const StagedTree& st);

/// Smoothed estimate for one floret; throws NumericError when m + lambda k = 0.
std::vector<double> estimate_probs(const std::vector<double>& counts, double lambda);

/// sum_j n_j ln p_j of one stage, with 0 ln 0 := 0.
double stage_loglik(const std::vector<double>& counts, const std::vector<double>& probs);

double loglik(const StagedTree& st);
/// Free parameters; the unobserved stage of a stratum counts as one stage.
long df(const StagedTree& st);
double aic(const StagedTree& st);
double bic(const StagedTree& st);
ModelScore score(const StagedTree& st);

double aic_from(double loglik, long df);
double bic_from(double loglik, long df, double n);

}  // namespace stagedtrees
