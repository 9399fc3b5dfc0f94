#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stagedtrees/event_tree.hpp"

namespace stagedtrees {

using StageId = std::string;

inline constexpr const char* kDefaultUnobserved = "na";

struct Stage {
  /// Per-level counts of the floret; empty when no data is attached.
  std::vector<double> counts;
  /// Per-level probabilities; absent for the unobserved stage and for unfitted models.
  std::optional<std::vector<double>> probs;

  double total() const;
  bool operator==(const Stage&) const = default;
};

/// Stage assignment of one stratum plus the floret counts of its vertices.
struct Stratum {
  std::vector<StageId> vertex_stage;
  std::map<StageId, Stage> stages;
  /// Row-major vertices x levels; empty when no data is attached.
  std::vector<double> vertex_counts;

  std::size_t num_vertices() const { return vertex_stage.size(); }
  bool has_counts() const { return !vertex_counts.empty(); }
  std::span<const double> counts_of(std::size_t vertex, std::size_t k) const {
    return std::span<const double>(vertex_counts).subspan(vertex * k, k);
  }
  bool operator==(const Stratum&) const = default;
};

/// A stratified staged event tree.
///
/// Values are validated at construction and never mutated afterwards; every
/// transformation in the library builds a new StagedTree. Stage labels are
/// local to a stratum, so a stage can never span two strata. Stratum 0 holds
/// only the root, which is alone in its stage.
class StagedTree {
 public:
  StagedTree(EventTree tree, std::vector<Stratum> strata, double lambda = 0.0,
             std::string unobserved_name = kDefaultUnobserved, bool fitted = false);

  const EventTree& tree() const { return tree_; }
  const std::vector<Stratum>& strata() const { return strata_; }
  const Stratum& stratum(std::size_t d) const { return strata_.at(d); }
  double lambda() const { return lambda_; }
  const std::string& unobserved_name() const { return unobserved_; }
  bool fitted() const { return fitted_; }
  /// True when every stratum carries per-vertex floret counts.
  bool has_counts() const;

  const StageId& stage_of(VertexId v) const;
  const Stage& stage(std::size_t d, const StageId& id) const;
  bool has_stage(std::size_t d, const StageId& id) const;
  bool is_unobserved(const StageId& id) const { return id == unobserved_; }
  bool has_unobserved(std::size_t d) const;

  /// Stage labels of stratum d ordered by their first member vertex, with the
  /// unobserved stage (if any) excluded.
  std::vector<StageId> observed_stages(std::size_t d) const;
  /// All stage labels of stratum d ordered by first member vertex.
  std::vector<StageId> stages_in_order(std::size_t d) const;
  std::vector<std::size_t> members(std::size_t d, const StageId& id) const;

  /// Total observations (sum of the root floret counts); 0 without data.
  double total_count() const;

  bool operator==(const StagedTree&) const = default;

 private:
  void validate() const;

  EventTree tree_;
  std::vector<Stratum> strata_;
  double lambda_ = 0.0;
  std::string unobserved_;
  bool fitted_ = false;
};

/// Builds an unfitted staged tree from a list of stage labels per stratum.
/// `labels[d]` assigns a stage to each vertex of stratum d; labels[0] must be
/// a single entry.
StagedTree staged_tree_from_labels(const EventTree& tree,
                                   const std::vector<std::vector<StageId>>& labels,
                                   std::string unobserved_name = kDefaultUnobserved);

/// Parent sets of a Bayesian network over the tree variables, by name.
using ParentSets = std::map<std::string, std::vector<std::string>>;

/// The staging that encodes a Bayesian network: vertices of stratum d share a
/// stage iff their paths agree on every parent of variable d. The result is
/// unfitted and has no unobserved stages.
StagedTree as_staged_tree_from_bn(const EventTree& tree, const ParentSets& parents);

/// Smallest positive integer label not present in `taken`.
StageId fresh_stage_label(const std::map<StageId, Stage>& taken, const std::string& reserved);

}  // namespace stagedtrees
