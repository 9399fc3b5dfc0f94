#include "stagedtrees/estimation.hpp"

#include <cmath>

#include "stagedtrees/errors.hpp"

namespace stagedtrees {

namespace {

Dataset ordered(const Dataset& ds, const InitOptions& options) {
  return options.order ? ds.reordered(*options.order) : ds;
}

StagedTree initial(const Dataset& ds, const InitOptions& options, bool saturated) {
  if (options.name_unobserved.find_first_not_of("0123456789") == std::string::npos) {
    throw ValidationError("unobserved stage name must not be a plain number");
  }
  if (!(ds.total() > 0.0)) throw ValidationError("dataset has no observations");
  const Dataset data = ordered(ds, options);
  const auto& tree = data.tree();
  std::vector<std::vector<StageId>> labels(tree.size());
  labels[0] = {"1"};
  for (std::size_t d = 1; d < tree.size(); ++d) {
    const std::size_t size = tree.stratum_size(d);
    labels[d].reserve(size);
    std::size_t next = 0;
    for (std::size_t v = 0; v < size; ++v) {
      const bool observed = !options.join_unobserved || data.prefix_count({d, v}) > 0.0;
      if (!observed) {
        labels[d].push_back(options.name_unobserved);
      } else {
        labels[d].push_back(saturated ? std::to_string(++next) : "1");
      }
    }
  }
  return fit(staged_tree_from_labels(tree, labels, options.name_unobserved), data, options.lambda);
}

}  // namespace

StagedTree full(const Dataset& ds, const InitOptions& options) { return initial(ds, options, true); }

StagedTree indep(const Dataset& ds, const InitOptions& options) { return initial(ds, options, false); }

std::vector<double> estimate_probs(const std::vector<double>& counts, double lambda) {
  double m = 0.0;
  for (double c : counts) m += c;
  const double denom = m + lambda * static_cast<double>(counts.size());
  if (!(denom > 0.0)) throw NumericError("stage has no observations and lambda is 0");
  std::vector<double> p(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) p[j] = (counts[j] + lambda) / denom;
  return p;
}

double stage_loglik(const std::vector<double>& counts, const std::vector<double>& probs) {
  double ll = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0.0) continue;
    if (probs[j] <= 0.0) throw NumericError("positive count on a zero-probability edge");
    ll += counts[j] * std::log(probs[j]);
  }
  return ll;
}

StagedTree fit(const StagedTree& st, const Dataset& ds, double lambda) {
  if (!(st.tree() == ds.tree())) throw ValidationError("model and data have different variables or levels");
  const auto& tree = st.tree();
  std::vector<Stratum> strata = st.strata();
  for (std::size_t d = 0; d < tree.size(); ++d) {
    auto& s = strata[d];
    const std::size_t k = tree.cardinality(d);
    s.vertex_counts = ds.floret_counts(d);
    for (auto& [id, stage] : s.stages) {
      stage.counts.assign(k, 0.0);
      stage.probs.reset();
    }
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      auto& acc = s.stages[s.vertex_stage[v]].counts;
      auto c = s.counts_of(v, k);
      for (std::size_t j = 0; j < k; ++j) acc[j] += c[j];
    }
    for (auto& [id, stage] : s.stages) {
      if (id == st.unobserved_name()) continue;
      try {
        stage.probs = estimate_probs(stage.counts, lambda);
      } catch (const NumericError&) {
        throw NumericError("stage '" + id + "' of '" + tree.variable(d).name +
                           "' has no observations; use lambda > 0 or join unobserved vertices");
      }
    }
  }
  return StagedTree(tree, std::move(strata), lambda, st.unobserved_name(), true);
}

StagedTree refit(const StagedTree& st) {
  std::vector<Stratum> strata = st.strata();
  for (auto& s : strata) {
    for (auto& [id, stage] : s.stages) {
      if (id == st.unobserved_name()) continue;
      if (stage.counts.empty()) throw ValidationError("cannot refit a model without counts");
      stage.probs = estimate_probs(stage.counts, st.lambda());
    }
  }
  return StagedTree(st.tree(), std::move(strata), st.lambda(), st.unobserved_name(), true);
}

StagedTree collapse_unobserved(const StagedTree& st, const Dataset& ds, const std::string& name) {
  if (!(st.tree() == ds.tree())) throw ValidationError("model and data have different variables or levels");
  if (name != st.unobserved_name()) {
    for (const auto& s : st.strata()) {
      if (s.stages.count(name)) throw ValidationError("stage name '" + name + "' already in use");
    }
  }
  const auto& tree = st.tree();
  std::vector<Stratum> strata = st.strata();
  for (std::size_t d = 1; d < tree.size(); ++d) {
    auto& s = strata[d];
    const std::size_t k = tree.cardinality(d);
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      if (s.vertex_stage[v] == st.unobserved_name() || ds.prefix_count({d, v}) == 0.0) {
        s.vertex_stage[v] = name;
      }
    }
    // Moved vertices carry zero counts, so surviving stage counts are unchanged.
    std::map<StageId, Stage> stages;
    for (const auto& id : s.vertex_stage) {
      if (stages.count(id)) continue;
      Stage stage;
      if (id != name) {
        stage = s.stages.at(id);
      } else if (!s.stages.begin()->second.counts.empty()) {
        stage.counts.assign(k, 0.0);
      }
      stages.emplace(id, std::move(stage));
    }
    s.stages = std::move(stages);
  }
  return StagedTree(tree, std::move(strata), st.lambda(), name, st.fitted());
}

double loglik(const StagedTree& st) {
  if (!st.fitted()) throw ValidationError("model is not fitted");
  double ll = 0.0;
  for (std::size_t d = 0; d < st.tree().size(); ++d) {
    for (const auto& id : st.stages_in_order(d)) {
      if (st.is_unobserved(id)) continue;
      const auto& stage = st.stage(d, id);
      ll += stage_loglik(stage.counts, *stage.probs);
    }
  }
  return ll;
}

long df(const StagedTree& st) {
  long total = 0;
  for (std::size_t d = 0; d < st.tree().size(); ++d) {
    total += static_cast<long>(st.stratum(d).stages.size()) * static_cast<long>(st.tree().cardinality(d) - 1);
  }
  return total;
}

double aic_from(double ll, long df) { return 2.0 * static_cast<double>(df) - 2.0 * ll; }

double bic_from(double ll, long df, double n) {
  return static_cast<double>(df) * std::log(n) - 2.0 * ll;
}

double aic(const StagedTree& st) { return aic_from(loglik(st), df(st)); }

double bic(const StagedTree& st) { return bic_from(loglik(st), df(st), st.total_count()); }

ModelScore score(const StagedTree& st) {
  ModelScore s;
  s.loglik = loglik(st);
  s.df = df(st);
  s.n = st.total_count();
  s.aic = aic_from(s.loglik, s.df);
  s.bic = bic_from(s.loglik, s.df, s.n);
  return s;
}

}  // namespace stagedtrees
