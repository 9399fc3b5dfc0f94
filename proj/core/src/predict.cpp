#include "stagedtrees/predict.hpp"

#include <algorithm>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/query.hpp"

namespace stagedtrees {

namespace {

constexpr std::size_t kFree = static_cast<std::size_t>(-1);

std::size_t argmax(const std::vector<double>& p) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (p[j] > p[best]) best = j;
  }
  return best;
}

}  // namespace

std::vector<std::size_t> predict(const StagedTree& st, std::string_view class_var, std::span<const Record> rows) {
  if (!st.fitted()) throw ValidationError("model is not fitted");
  const auto& tree = st.tree();
  const std::size_t c = tree.index_of(class_var);
  const std::size_t k = tree.cardinality(c);

  std::vector<double> marginal(k);
  LevelPattern pattern(tree.size(), kFree);
  for (std::size_t j = 0; j < k; ++j) {
    pattern[c] = j;
    marginal[j] = prob(st, pattern);
  }
  const std::size_t fallback = argmax(marginal);

  std::vector<std::size_t> out;
  out.reserve(rows.size());
  std::vector<double> joint(k);
  for (const auto& row : rows) {
    if (row.size() != tree.size()) throw ValidationError("row length differs from the number of variables");
    Record r = row;
    bool complete = true;
    for (std::size_t d = 0; d < tree.size(); ++d) {
      if (d == c) continue;
      if (r[d] == kFree) {
        complete = false;
      } else if (r[d] >= tree.cardinality(d)) {
        throw ValidationError("level index out of range for '" + tree.variable(d).name + "'");
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      r[c] = j;
      joint[j] = complete ? path_probability(st, r) : prob(st, r);
    }
    const bool any = std::any_of(joint.begin(), joint.end(), [](double p) { return p > 0.0; });
    out.push_back(any ? argmax(joint) : fallback);
  }
  return out;
}

double accuracy(std::span<const std::size_t> predicted, std::span<const Record> rows, std::size_t class_index) {
  if (predicted.size() != rows.size()) throw ValidationError("prediction and row counts differ");
  if (rows.empty()) throw ValidationError("accuracy of an empty set is undefined");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hits += predicted[i] == rows[i].at(class_index);
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

}  // namespace stagedtrees
