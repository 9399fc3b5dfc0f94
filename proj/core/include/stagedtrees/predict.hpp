#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

/// Most probable level of `class_var` for each row, by the joint probability
/// of the completed row. Rows are level indices per tree variable; the class
/// entry is ignored and npos entries of other variables are marginalized.
/// Ties go to the earlier level. A row whose completions all have probability
/// 0 gets the level with the largest marginal probability.
std::vector<std::size_t> predict(const StagedTree& st, std::string_view class_var, std::span<const Record> rows);

/// Fraction of rows whose class entry equals the prediction.
double accuracy(std::span<const std::size_t> predicted, std::span<const Record> rows, std::size_t class_index);

}  // namespace stagedtrees
