#include "stagedtrees/dataset.hpp"

#include <cmath>
#include <numeric>

#include "stagedtrees/errors.hpp"

namespace stagedtrees {

Dataset::Dataset(EventTree tree, std::vector<double> counts)
    : tree_(std::move(tree)), counts_(std::move(counts)) {
  if (counts_.size() != tree_.num_leaves()) {
    throw ValidationError("counts length must equal the size of the product space");
  }
  for (double c : counts_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("counts must be finite and non-negative");
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

Dataset Dataset::from_records(EventTree tree, std::span<const Record> records) {
  std::vector<double> counts(tree.num_leaves(), 0.0);
  for (const auto& r : records) {
    if (r.size() != tree.size()) throw ValidationError("record has the wrong number of fields");
    counts[tree.encode_levels(r).index] += 1.0;
  }
  return Dataset(std::move(tree), std::move(counts));
}

double Dataset::cell(std::span<const std::size_t> levels) const {
  if (levels.size() != tree_.size()) throw ValidationError("cell needs a level for every variable");
  return counts_[tree_.encode_levels(levels).index];
}

std::vector<double> Dataset::floret_counts(std::size_t d) const {
  const std::size_t k = tree_.cardinality(d);
  const std::size_t vertices = tree_.stratum_size(d);
  const std::size_t below = tree_.num_leaves() / (vertices * k);
  std::vector<double> out(vertices * k, 0.0);
  for (std::size_t row = 0; row < vertices * k; ++row) {
    const double* first = counts_.data() + row * below;
    out[row] = std::accumulate(first, first + below, 0.0);
  }
  return out;
}

double Dataset::prefix_count(VertexId v) const {
  const std::size_t below = tree_.num_leaves() / tree_.stratum_size(v.stratum);
  if (v.index >= tree_.stratum_size(v.stratum)) throw ValidationError("vertex index out of range");
  const double* first = counts_.data() + v.index * below;
  return std::accumulate(first, first + below, 0.0);
}

Dataset Dataset::reordered(std::span<const std::string> order) const {
  EventTree target = tree_.reordered(order);
  const std::size_t n = tree_.size();
  std::vector<std::size_t> source_pos(n);
  for (std::size_t i = 0; i < n; ++i) source_pos[i] = tree_.index_of(order[i]);
  std::vector<double> counts(counts_.size(), 0.0);
  std::vector<std::size_t> levels(n), permuted(n);
  for (std::size_t cell = 0; cell < counts_.size(); ++cell) {
    levels = tree_.decode_levels({n, cell});
    for (std::size_t i = 0; i < n; ++i) permuted[i] = levels[source_pos[i]];
    counts[target.encode_levels(permuted).index] = counts_[cell];
  }
  return Dataset(std::move(target), std::move(counts));
}

std::vector<Record> Dataset::to_records() const {
  std::vector<Record> out;
  const std::size_t n = tree_.size();
  for (std::size_t cell = 0; cell < counts_.size(); ++cell) {
    const double c = counts_[cell];
    if (c != std::floor(c)) throw ValidationError("counts are not whole numbers");
    if (c == 0.0) continue;
    auto levels = tree_.decode_levels({n, cell});
    for (std::size_t i = 0; i < static_cast<std::size_t>(c); ++i) out.push_back(levels);
  }
  return out;
}

}  // namespace stagedtrees
