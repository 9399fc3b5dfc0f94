#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagedtrees/divergence.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

enum class ScoreKind { neg_bic, neg_aic, loglik };
enum class Linkage { complete, single, average };
enum class Algorithm { hc, bhc, fbhc, bhcr, bj, hclust, kmeans };

struct SearchConfig {
  ScoreKind score = ScoreKind::neg_bic;
  /// Variables whose strata are searched; all non-root strata when unset.
  std::optional<std::vector<std::string>> scope;
  std::uint64_t seed = 0;
  std::size_t max_iter = 100;
  double thr = 0.1;
  std::size_t k = 2;
  DivergenceSpec distance = DivergenceSpec::kl();
  Linkage linkage = Linkage::complete;
  std::size_t n_restarts = 10;
};

ScoreKind parse_score(std::string_view name);
Linkage parse_linkage(std::string_view name);
Algorithm parse_algorithm(std::string_view name);
std::string algorithm_name(Algorithm alg);

/// The configured score of a fitted model (larger is better).
double search_score(const StagedTree& st, ScoreKind kind);

/// Merges observed stage `b` into `a` and refits the merged stage.
StagedTree join_stages(const StagedTree& st, std::size_t stratum, const StageId& a, const StageId& b);

/// Best-improvement hill climbing over single-vertex moves (to another stage
/// or to a new singleton stage). Needs per-vertex counts.
StagedTree stages_hc(const StagedTree& st, const SearchConfig& cfg = {});
/// Best-improvement backward joining.
StagedTree stages_bhc(const StagedTree& st, const SearchConfig& cfg = {});
/// First-improvement backward joining, scanning pairs in stage order.
StagedTree stages_fbhc(const StagedTree& st, const SearchConfig& cfg = {});
/// max_iter random (stratum, stage pair) proposals, joined when they improve.
StagedTree stages_bhcr(const StagedTree& st, const SearchConfig& cfg = {});
/// Joins the closest pair of stages while their distance is below thr.
StagedTree stages_bj(const StagedTree& st, const SearchConfig& cfg = {});
/// Agglomerative clustering of stage distributions into k stages per stratum.
StagedTree stages_hclust(const StagedTree& st, const SearchConfig& cfg = {});
/// Lloyd k-means on stage distributions, best of n_restarts.
StagedTree stages_kmeans(const StagedTree& st, const SearchConfig& cfg = {});

StagedTree learn(const StagedTree& st, Algorithm alg, const SearchConfig& cfg = {});

}  // namespace stagedtrees
