#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

/// Position ids per stratum: positions[d][v] numbers the positions of
/// stratum d from 0 in order of their first member vertex. Two vertices share
/// a position iff they share a stage and, level by level, their children
/// share a position; all unobserved vertices of a stratum form one position.
std::vector<std::vector<std::size_t>> positions(const StagedTree& st);

struct CegNode {
  /// Stratum of the member vertices; tree.size() for the sink.
  std::size_t stratum = 0;
  std::vector<std::size_t> vertices;
  StageId stage;
};

struct CegEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t level = 0;
  /// Absent on edges leaving the unobserved position.
  std::optional<double> prob;
};

/// Chain event graph. Nodes are numbered root first, then stratum by stratum
/// in first-member order, with the sink last. Each non-sink node has one
/// edge per level of its variable, so parallel edges are kept.
struct Ceg {
  EventTree tree;
  std::string unobserved_name;
  std::vector<CegNode> nodes;
  std::vector<CegEdge> edges;
  /// node_of[d][v]: node index of vertex v of stratum d.
  std::vector<std::vector<std::size_t>> node_of;

  std::size_t root() const { return 0; }
  std::size_t sink() const { return nodes.size() - 1; }
  /// Edges leaving `node`, in level order.
  std::vector<CegEdge> out_edges(std::size_t node) const;
};

Ceg ceg(const StagedTree& st);

/// Product of edge probabilities along the walk of a full assignment (0 when
/// the walk leaves the unobserved position).
double ceg_path_probability(const Ceg& c, std::span<const std::size_t> levels);

/// Unfolds the graph back into a staged tree: every vertex takes the stage
/// and floret of the node its path reaches.
StagedTree ceg_to_staged_tree(const Ceg& c);

/// Entry (i, j) counts the edges from node i to node j.
std::vector<std::vector<int>> ceg_adjmat(const Ceg& c);
std::string adjmat_csv(const Ceg& c);

std::string tree_to_dot(const StagedTree& st);
std::string ceg_to_dot(const Ceg& c);

}  // namespace stagedtrees
