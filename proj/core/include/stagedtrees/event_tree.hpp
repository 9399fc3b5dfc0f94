#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stagedtrees {

struct Variable {
  std::string name;
  std::vector<std::string> levels;

  std::size_t cardinality() const { return levels.size(); }
  bool operator==(const Variable&) const = default;
};

/// A vertex of the event tree: its depth (stratum) and the mixed-radix index
/// of the path prefix leading to it, first variable most significant.
struct VertexId {
  std::size_t stratum = 0;
  std::size_t index = 0;

  auto operator<=>(const VertexId&) const = default;
};

using Path = std::vector<std::string>;

/// Ordered categorical variables defining an X-compatible event tree.
///
/// Stratum d holds the prod_{j<d} |X_j| vertices whose outgoing edges are the
/// levels of variable d; stratum n (one past the last variable) is the leaves.
/// Every stratum is addressed densely, so the product space must stay small
/// enough to materialize.
class EventTree {
 public:
  static constexpr std::size_t kMaxLeaves = std::size_t{1} << 28;

  explicit EventTree(std::vector<Variable> variables);

  std::size_t size() const { return vars_.size(); }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(std::size_t d) const { return vars_.at(d); }
  std::size_t cardinality(std::size_t d) const { return vars_.at(d).levels.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ValidationError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  /// Throws ValidationError for an unknown label.
  std::size_t level_index(std::size_t var, std::string_view label) const;

  /// Number of vertices in stratum d, for d in [0, n]; stratum n is the leaves.
  std::size_t stratum_size(std::size_t d) const { return sizes_.at(d); }
  std::size_t num_leaves() const { return sizes_.back(); }
  std::size_t num_vertices() const;

  VertexId encode(std::span<const std::string> path) const;
  VertexId encode_levels(std::span<const std::size_t> levels) const;
  Path decode(VertexId v) const;
  std::vector<std::size_t> decode_levels(VertexId v) const;

  VertexId child(VertexId v, std::size_t level) const;

  std::vector<std::string> names() const;
  /// The same variables permuted into `order` (which must name each once).
  EventTree reordered(std::span<const std::string> order) const;

  /// "Class[4] -> Sex[2] -> Age[2] -> Survived[2]"
  std::string describe() const;

  bool operator==(const EventTree& other) const { return vars_ == other.vars_; }

 private:
  std::vector<Variable> vars_;
  std::vector<std::size_t> sizes_;
};

VertexId encode_path(const EventTree& tree, std::span<const std::string> path);
Path decode_vertex(const EventTree& tree, VertexId v);

}  // namespace stagedtrees
