#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stagedtrees/event_tree.hpp"

namespace stagedtrees {

/// One observation: a level index per tree variable.
using Record = std::vector<std::size_t>;

/// Contingency counts over the full product space, indexed in the same mixed
/// radix as the leaves of the event tree (first variable most significant).
class Dataset {
 public:
  Dataset(EventTree tree, std::vector<double> counts);

  static Dataset from_records(EventTree tree, std::span<const Record> records);

  const EventTree& tree() const { return tree_; }
  std::span<const double> counts() const { return counts_; }
  double total() const { return total_; }

  double cell(std::span<const std::size_t> levels) const;

  /// Floret counts of stratum d, row-major vertices x levels of variable d.
  std::vector<double> floret_counts(std::size_t d) const;
  /// Observations whose path passes through v.
  double prefix_count(VertexId v) const;

  /// Same data with the variables permuted into `order`.
  Dataset reordered(std::span<const std::string> order) const;

  /// Expands integral counts into records in cell order. Throws
  /// ValidationError if a count is not a whole number.
  std::vector<Record> to_records() const;

 private:
  EventTree tree_;
  std::vector<double> counts_;
  double total_ = 0.0;
};

}  // namespace stagedtrees
