#include "stagedtrees/staged_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "stagedtrees/errors.hpp"

namespace stagedtrees {

namespace {

constexpr double kSumTolerance = 1e-9;

}  // namespace

double Stage::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

StagedTree::StagedTree(EventTree tree, std::vector<Stratum> strata, double lambda,
                       std::string unobserved_name, bool fitted)
    : tree_(std::move(tree)),
      strata_(std::move(strata)),
      lambda_(lambda),
      unobserved_(std::move(unobserved_name)),
      fitted_(fitted) {
  validate();
}

void StagedTree::validate() const {
  const std::size_t n = tree_.size();
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw ValidationError("lambda must be a finite non-negative number");
  }
  if (unobserved_.empty()) throw ValidationError("unobserved stage name must not be empty");
  if (strata_.size() != n) throw ValidationError("one stratum per variable is required");

  for (std::size_t d = 0; d < n; ++d) {
    const auto& s = strata_[d];
    const std::size_t k = tree_.cardinality(d);
    const std::size_t size = tree_.stratum_size(d);
    const std::string where = "stratum '" + tree_.variable(d).name + "'";
    if (s.vertex_stage.size() != size) {
      throw ValidationError(where + ": expected " + std::to_string(size) + " vertices");
    }
    if (d == 0 && s.vertex_stage.front() == unobserved_) {
      throw ValidationError("the root cannot be in the unobserved stage");
    }
    if (!s.vertex_counts.empty() && s.vertex_counts.size() != size * k) {
      throw ValidationError(where + ": vertex counts have the wrong length");
    }
    std::set<StageId> used(s.vertex_stage.begin(), s.vertex_stage.end());
    if (used.size() != s.stages.size() ||
        !std::equal(used.begin(), used.end(), s.stages.begin(),
                    [](const StageId& a, const auto& kv) { return a == kv.first; })) {
      throw ValidationError(where + ": stage table does not match the vertex assignment");
    }
    for (const auto& [id, stage] : s.stages) {
      if (id.empty()) throw ValidationError(where + ": empty stage label");
      const bool unobserved = id == unobserved_;
      if (!stage.counts.empty() && stage.counts.size() != k) {
        throw ValidationError(where + ": stage '" + id + "' counts have the wrong length");
      }
      for (double c : stage.counts) {
        if (!(c >= 0.0)) throw ValidationError(where + ": negative count in stage '" + id + "'");
      }
      if (unobserved && stage.probs) {
        throw ValidationError(where + ": the unobserved stage cannot carry probabilities");
      }
      if (fitted_ && !unobserved && !stage.probs) {
        throw ValidationError(where + ": fitted model is missing probabilities for stage '" + id + "'");
      }
      if (stage.probs) {
        if (stage.probs->size() != k) {
          throw ValidationError(where + ": stage '" + id + "' probabilities have the wrong length");
        }
        double sum = 0.0;
        for (double p : *stage.probs) {
          if (!(p >= 0.0)) throw ValidationError(where + ": negative probability in stage '" + id + "'");
          sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance) {
          throw ValidationError(where + ": probabilities of stage '" + id + "' do not sum to 1");
        }
      }
    }
    if (s.has_counts()) {
      std::map<StageId, std::vector<double>> sums;
      for (std::size_t v = 0; v < size; ++v) {
        auto& acc = sums[s.vertex_stage[v]];
        acc.resize(k, 0.0);
        auto c = s.counts_of(v, k);
        for (std::size_t j = 0; j < k; ++j) acc[j] += c[j];
      }
      for (const auto& [id, stage] : s.stages) {
        if (stage.counts.empty()) continue;
        const auto& acc = sums[id];
        for (std::size_t j = 0; j < k; ++j) {
          if (std::abs(acc[j] - stage.counts[j]) > kSumTolerance * std::max(1.0, acc[j])) {
            throw ValidationError(where + ": counts of stage '" + id +
                                  "' differ from the sum of its vertices");
          }
        }
      }
    }
  }
}

bool StagedTree::has_counts() const {
  return std::all_of(strata_.begin(), strata_.end(), [](const Stratum& s) { return s.has_counts(); });
}

const StageId& StagedTree::stage_of(VertexId v) const {
  if (v.stratum >= strata_.size()) throw ValidationError("leaves have no stage");
  const auto& s = strata_[v.stratum];
  if (v.index >= s.vertex_stage.size()) throw ValidationError("vertex index out of range");
  return s.vertex_stage[v.index];
}

const Stage& StagedTree::stage(std::size_t d, const StageId& id) const {
  const auto& stages = strata_.at(d).stages;
  auto it = stages.find(id);
  if (it == stages.end()) {
    throw ValidationError("unknown stage '" + id + "' for variable '" + tree_.variable(d).name + "'");
  }
  return it->second;
}

bool StagedTree::has_stage(std::size_t d, const StageId& id) const {
  return strata_.at(d).stages.count(id) > 0;
}

bool StagedTree::has_unobserved(std::size_t d) const { return has_stage(d, unobserved_); }

std::vector<StageId> StagedTree::stages_in_order(std::size_t d) const {
  std::vector<StageId> out;
  std::set<StageId> seen;
  for (const auto& id : strata_.at(d).vertex_stage) {
    if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

std::vector<StageId> StagedTree::observed_stages(std::size_t d) const {
  auto all = stages_in_order(d);
  std::erase(all, unobserved_);
  return all;
}

std::vector<std::size_t> StagedTree::members(std::size_t d, const StageId& id) const {
  std::vector<std::size_t> out;
  const auto& vs = strata_.at(d).vertex_stage;
  for (std::size_t v = 0; v < vs.size(); ++v) {
    if (vs[v] == id) out.push_back(v);
  }
  return out;
}

double StagedTree::total_count() const {
  const auto& root = strata_.front();
  if (!root.has_counts()) return 0.0;
  return std::accumulate(root.vertex_counts.begin(), root.vertex_counts.end(), 0.0);
}

StagedTree staged_tree_from_labels(const EventTree& tree,
                                   const std::vector<std::vector<StageId>>& labels,
                                   std::string unobserved_name) {
  if (labels.size() != tree.size()) throw ValidationError("one label list per stratum is required");
  std::vector<Stratum> strata(tree.size());
  for (std::size_t d = 0; d < tree.size(); ++d) {
    strata[d].vertex_stage = labels[d];
    for (const auto& id : labels[d]) strata[d].stages.try_emplace(id);
  }
  return StagedTree(tree, std::move(strata), 0.0, std::move(unobserved_name), false);
}

StagedTree as_staged_tree_from_bn(const EventTree& tree, const ParentSets& parents) {
  const std::size_t n = tree.size();
  std::vector<std::vector<std::size_t>> parent_idx(n);
  for (const auto& [child, ps] : parents) {
    const std::size_t c = tree.index_of(child);
    for (const auto& p : ps) {
      const std::size_t pi = tree.index_of(p);
      if (pi >= c) {
        throw ValidationError("parent '" + p + "' of '" + child + "' is not earlier in the order");
      }
      parent_idx[c].push_back(pi);
    }
    std::sort(parent_idx[c].begin(), parent_idx[c].end());
    parent_idx[c].erase(std::unique(parent_idx[c].begin(), parent_idx[c].end()), parent_idx[c].end());
  }

  std::vector<std::vector<StageId>> labels(n);
  labels[0] = {"1"};
  for (std::size_t d = 1; d < n; ++d) {
    const std::size_t size = tree.stratum_size(d);
    labels[d].resize(size);
    std::map<std::vector<std::size_t>, std::size_t> config_stage;
    for (std::size_t v = 0; v < size; ++v) {
      auto path = tree.decode_levels({d, v});
      std::vector<std::size_t> config;
      for (auto p : parent_idx[d]) config.push_back(path[p]);
      auto [it, inserted] = config_stage.try_emplace(config, config_stage.size() + 1);
      labels[d][v] = std::to_string(it->second);
    }
  }
  return staged_tree_from_labels(tree, labels);
}

StageId fresh_stage_label(const std::map<StageId, Stage>& taken, const std::string& reserved) {
  for (std::size_t i = 1;; ++i) {
    auto id = std::to_string(i);
    if (id != reserved && taken.count(id) == 0) return id;
  }
}

}  // namespace stagedtrees
