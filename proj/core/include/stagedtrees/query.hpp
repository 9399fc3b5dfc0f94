#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

/// Variable name -> level label, over any subset of the variables.
using Assignment = std::map<std::string, std::string>;

/// Level index per variable, npos where the variable is left free.
using LevelPattern = std::vector<std::size_t>;

LevelPattern to_pattern(const EventTree& tree, const Assignment& event);

/// Probability of an event, by a single pass down the strata as far as the
/// deepest constrained variable; the free variables below it are summed out
/// as whole florets. Mass entering an unobserved stage above that depth is
/// dropped, so refining an event by a deeper variable can lose mass.
double prob(const StagedTree& st, const Assignment& event, bool log = false);
double prob(const StagedTree& st, std::span<const std::size_t> pattern);

/// Product of the edge probabilities along one root-to-leaf path (0 through
/// an unobserved stage).
double path_probability(const StagedTree& st, std::span<const std::size_t> levels);

struct Atom {
  std::vector<std::size_t> levels;
  double prob = 0.0;
};

/// Every leaf with its probability, in leaf index order.
std::vector<Atom> atomic_probs(const StagedTree& st);

/// n independent root-to-leaf walks. Each step draws one uniform from an
/// Rng seeded with `seed`, choosing a child with weight p_j times the mass
/// of its subtree that avoids unobserved stages, so no sample enters one.
std::vector<Record> sample_from(const StagedTree& st, std::size_t n, std::uint64_t seed);

/// Stage of the vertex reached by a prefix of length 1..n-1.
StageId get_stage(const StagedTree& st, std::span<const std::string> path);

/// Prefixes (in vertex order) of every vertex of `var`'s stratum in `stage`.
std::vector<Path> get_path(const StagedTree& st, std::string_view var, const StageId& stage);

/// The staged tree rooted at the vertex reached by `path`, over the remaining
/// variables. Stage labels and probabilities are kept; counts are restricted.
StagedTree subtree(const StagedTree& st, std::span<const std::string> path);

enum class CompareMethod { stages, naive, hamming };
CompareMethod parse_compare_method(std::string_view name);

/// Per stratum, the vertices on which two stagings disagree.
struct StageDiff {
  std::vector<std::vector<std::size_t>> vertices;

  bool empty() const;
};

struct Comparison {
  bool equal = false;
  StageDiff diff;
};

/// stages: equal set partitions per stratum; the diff lists vertices whose
/// block differs. naive: equal multisets of stage sizes per stratum; the diff
/// lists, in unequal strata, vertices whose block size differs. hamming:
/// labels compared vertex by vertex after stndnaming.
Comparison compare_stages(const StagedTree& a, const StagedTree& b, CompareMethod method = CompareMethod::stages);

/// Observed stages renamed "1","2",... per stratum by first member vertex.
StagedTree stndnaming(const StagedTree& st);

struct SummaryRow {
  StageId stage;
  std::size_t npaths = 0;
  double sample_size = 0.0;
  std::optional<std::vector<double>> probs;
};

struct SummaryStratum {
  std::string variable;
  std::vector<std::string> levels;
  std::vector<SummaryRow> rows;
};

/// Observed stages in first-member order, then the unobserved stage. The
/// root row reports 0 paths, as the root is reached by the empty path.
std::vector<SummaryStratum> summary(const StagedTree& st);
std::string format_summary(const StagedTree& st);

}  // namespace stagedtrees
