#include "stagedtrees/event_tree.hpp"

#include <algorithm>
#include <set>

#include "stagedtrees/errors.hpp"

namespace stagedtrees {

EventTree::EventTree(std::vector<Variable> variables) : vars_(std::move(variables)) {
  if (vars_.empty()) throw ValidationError("event tree needs at least one variable");
  std::set<std::string> names;
  for (const auto& v : vars_) {
    if (v.name.empty()) throw ValidationError("variable name must not be empty");
    if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
    if (v.levels.size() < 2) {
      throw ValidationError("variable '" + v.name + "' needs at least two levels");
    }
    std::set<std::string> labels(v.levels.begin(), v.levels.end());
    if (labels.size() != v.levels.size()) {
      throw ValidationError("variable '" + v.name + "' has duplicate level labels");
    }
  }
  sizes_.reserve(vars_.size() + 1);
  sizes_.push_back(1);
  for (const auto& v : vars_) {
    if (sizes_.back() > kMaxLeaves / v.levels.size()) {
      throw ValidationError("product space too large to materialize");
    }
    sizes_.push_back(sizes_.back() * v.levels.size());
  }
}

std::optional<std::size_t> EventTree::find(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t EventTree::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ValidationError("unknown variable '" + std::string(name) + "'");
}

std::size_t EventTree::level_index(std::size_t var, std::string_view label) const {
  const auto& levels = vars_.at(var).levels;
  auto it = std::find(levels.begin(), levels.end(), label);
  if (it == levels.end()) {
    throw ValidationError("unknown level '" + std::string(label) + "' for variable '" +
                          vars_[var].name + "'");
  }
  return static_cast<std::size_t>(it - levels.begin());
}

std::size_t EventTree::num_vertices() const {
  std::size_t total = 0;
  for (auto s : sizes_) total += s;
  return total;
}

VertexId EventTree::encode(std::span<const std::string> path) const {
  if (path.size() > vars_.size()) throw ValidationError("path longer than the number of variables");
  std::size_t index = 0;
  for (std::size_t d = 0; d < path.size(); ++d) {
    index = index * vars_[d].levels.size() + level_index(d, path[d]);
  }
  return {path.size(), index};
}

VertexId EventTree::encode_levels(std::span<const std::size_t> levels) const {
  if (levels.size() > vars_.size()) throw ValidationError("path longer than the number of variables");
  std::size_t index = 0;
  for (std::size_t d = 0; d < levels.size(); ++d) {
    if (levels[d] >= vars_[d].levels.size()) throw ValidationError("level index out of range");
    index = index * vars_[d].levels.size() + levels[d];
  }
  return {levels.size(), index};
}

std::vector<std::size_t> EventTree::decode_levels(VertexId v) const {
  if (v.stratum > vars_.size() || v.index >= sizes_[v.stratum]) {
    throw ValidationError("vertex index out of range for its stratum");
  }
  std::vector<std::size_t> levels(v.stratum);
  std::size_t rest = v.index;
  for (std::size_t d = v.stratum; d-- > 0;) {
    levels[d] = rest % vars_[d].levels.size();
    rest /= vars_[d].levels.size();
  }
  return levels;
}

Path EventTree::decode(VertexId v) const {
  auto levels = decode_levels(v);
  Path path(levels.size());
  for (std::size_t d = 0; d < levels.size(); ++d) path[d] = vars_[d].levels[levels[d]];
  return path;
}

VertexId EventTree::child(VertexId v, std::size_t level) const {
  return {v.stratum + 1, v.index * vars_.at(v.stratum).levels.size() + level};
}

std::vector<std::string> EventTree::names() const {
  std::vector<std::string> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

EventTree EventTree::reordered(std::span<const std::string> order) const {
  if (order.size() != vars_.size()) {
    throw ValidationError("order must list every variable exactly once");
  }
  std::vector<Variable> vars;
  std::set<std::size_t> seen;
  for (const auto& name : order) {
    auto i = index_of(name);
    if (!seen.insert(i).second) throw ValidationError("variable '" + name + "' repeated in order");
    vars.push_back(vars_[i]);
  }
  return EventTree(std::move(vars));
}

std::string EventTree::describe() const {
  std::string out;
  for (std::size_t d = 0; d < vars_.size(); ++d) {
    if (d) out += " -> ";
    out += vars_[d].name + "[" + std::to_string(vars_[d].levels.size()) + "]";
  }
  return out;
}

VertexId encode_path(const EventTree& tree, std::span<const std::string> path) {
  return tree.encode(path);
}

Path decode_vertex(const EventTree& tree, VertexId v) { return tree.decode(v); }

}  // namespace stagedtrees
