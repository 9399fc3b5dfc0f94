#include "stagedtrees/ceg.hpp"

#include <array>
#include <map>
#include <sstream>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/format.hpp"

namespace stagedtrees {

namespace {

constexpr std::array<const char*, 12> kPalette = {
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33",
    "#a65628", "#f781bf", "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3"};
constexpr const char* kUnobservedColor = "#bdbdbd";

void require_fitted(const StagedTree& st) {
  if (!st.fitted()) throw ValidationError("model is not fitted");
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

std::string edge_label(const std::string& level, const std::optional<double>& p) {
  return p ? level + " / " + format_fixed(*p, 4) : level;
}

// Colour per stage label of one stratum, by first-member order.
std::map<StageId, std::string> stage_colors(const StagedTree& st, std::size_t d) {
  std::map<StageId, std::string> colors;
  std::size_t i = 0;
  for (const auto& id : st.observed_stages(d)) colors[id] = kPalette[i++ % kPalette.size()];
  colors[st.unobserved_name()] = kUnobservedColor;
  return colors;
}

}  // namespace

std::vector<std::vector<std::size_t>> positions(const StagedTree& st) {
  require_fitted(st);
  const auto& tree = st.tree();
  const std::size_t n = tree.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t d = n; d-- > 0;) {
    const auto& s = st.stratum(d);
    const std::size_t k = tree.cardinality(d);
    std::map<std::pair<StageId, std::vector<std::size_t>>, std::size_t> ids;
    out[d].resize(s.num_vertices());
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      std::vector<std::size_t> children;
      if (d + 1 < n && !st.is_unobserved(s.vertex_stage[v])) {
        children.assign(out[d + 1].begin() + static_cast<std::ptrdiff_t>(v * k),
                        out[d + 1].begin() + static_cast<std::ptrdiff_t>((v + 1) * k));
      }
      auto [it, inserted] = ids.try_emplace({s.vertex_stage[v], std::move(children)}, ids.size());
      out[d][v] = it->second;
    }
  }
  return out;
}

std::vector<CegEdge> Ceg::out_edges(std::size_t node) const {
  std::vector<CegEdge> out;
  for (const auto& e : edges) {
    if (e.from == node) out.push_back(e);
  }
  return out;
}

Ceg ceg(const StagedTree& st) {
  const auto pos = positions(st);
  const auto& tree = st.tree();
  const std::size_t n = tree.size();
  Ceg c{tree, st.unobserved_name(), {}, {}, {}};
  c.node_of.resize(n);
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t d = 0; d < n; ++d) {
    std::size_t count = 0;
    for (auto p : pos[d]) count = std::max(count, p + 1);
    offset[d + 1] = offset[d] + count;
    for (std::size_t i = 0; i < count; ++i) c.nodes.push_back({d, {}, {}});
    c.node_of[d].resize(pos[d].size());
    for (std::size_t v = 0; v < pos[d].size(); ++v) {
      const auto node = offset[d] + pos[d][v];
      c.node_of[d][v] = node;
      c.nodes[node].vertices.push_back(v);
      c.nodes[node].stage = st.stratum(d).vertex_stage[v];
    }
  }
  const std::size_t sink = c.nodes.size();
  c.nodes.push_back({n, {}, {}});
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t k = tree.cardinality(d);
    for (std::size_t node = offset[d]; node < offset[d + 1]; ++node) {
      const auto v = c.nodes[node].vertices.front();
      const auto& stage = st.stage(d, c.nodes[node].stage);
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t to = d + 1 < n ? c.node_of[d + 1][v * k + j] : sink;
        std::optional<double> p;
        if (stage.probs) p = (*stage.probs)[j];
        c.edges.push_back({node, to, j, p});
      }
    }
  }
  return c;
}

double ceg_path_probability(const Ceg& c, std::span<const std::size_t> levels) {
  if (levels.size() != c.tree.size()) throw ValidationError("a full path is required");
  std::vector<std::vector<const CegEdge*>> by_node(c.nodes.size());
  for (const auto& e : c.edges) by_node[e.from].push_back(&e);
  double p = 1.0;
  std::size_t node = c.root();
  for (auto level : levels) {
    const auto& out = by_node[node];
    if (level >= out.size()) throw ValidationError("level index out of range");
    const auto* e = out[level];
    if (!e->prob) return 0.0;
    p *= *e->prob;
    node = e->to;
  }
  return p;
}

StagedTree ceg_to_staged_tree(const Ceg& c) {
  const auto& tree = c.tree;
  const std::size_t n = tree.size();
  std::vector<std::vector<const CegEdge*>> by_node(c.nodes.size());
  for (const auto& e : c.edges) by_node[e.from].push_back(&e);

  std::vector<Stratum> strata(n);
  std::vector<std::size_t> reached{c.root()};
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t k = tree.cardinality(d);
    auto& s = strata[d];
    std::vector<std::size_t> next(reached.size() * k);
    for (std::size_t v = 0; v < reached.size(); ++v) {
      const auto& node = c.nodes[reached[v]];
      s.vertex_stage.push_back(node.stage);
      auto& stage = s.stages[node.stage];
      for (std::size_t j = 0; j < k; ++j) {
        const auto* e = by_node[reached[v]][j];
        next[v * k + j] = e->to;
        if (e->prob) {
          if (!stage.probs) stage.probs.emplace(k, 0.0);
          (*stage.probs)[j] = *e->prob;
        }
      }
    }
    reached = std::move(next);
  }
  return StagedTree(tree, std::move(strata), 0.0, c.unobserved_name, true);
}

std::vector<std::vector<int>> ceg_adjmat(const Ceg& c) {
  std::vector<std::vector<int>> m(c.nodes.size(), std::vector<int>(c.nodes.size(), 0));
  for (const auto& e : c.edges) ++m[e.from][e.to];
  return m;
}

namespace {

std::string node_name(const Ceg& c, std::size_t i) { return i == c.sink() ? "u_inf" : "u" + std::to_string(i); }

}  // namespace

std::string adjmat_csv(const Ceg& c) {
  const auto m = ceg_adjmat(c);
  std::ostringstream os;
  os << "node";
  for (std::size_t j = 0; j < m.size(); ++j) os << ',' << node_name(c, j);
  os << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << node_name(c, i);
    for (int x : m[i]) os << ',' << x;
    os << '\n';
  }
  return os.str();
}

std::string tree_to_dot(const StagedTree& st) {
  const auto& tree = st.tree();
  const std::size_t n = tree.size();
  std::ostringstream os;
  os << "digraph staged_tree {\n  rankdir=LR;\n  node [shape=circle, style=filled, label=\"\"];\n";
  for (std::size_t d = 0; d < n; ++d) {
    const auto colors = stage_colors(st, d);
    const auto& s = st.stratum(d);
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      const auto& id = s.vertex_stage[v];
      os << "  v" << d << '_' << v << " [fillcolor=" << quoted(colors.at(id))
         << ", tooltip=" << quoted(tree.variable(d).name + " stage " + id) << "];\n";
    }
  }
  for (std::size_t v = 0; v < tree.num_leaves(); ++v) {
    os << "  v" << n << '_' << v << " [shape=point, fillcolor=\"black\"];\n";
  }
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t k = tree.cardinality(d);
    const auto& s = st.stratum(d);
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      const auto& stage = st.stage(d, s.vertex_stage[v]);
      for (std::size_t j = 0; j < k; ++j) {
        std::optional<double> p;
        if (stage.probs) p = (*stage.probs)[j];
        os << "  v" << d << '_' << v << " -> v" << d + 1 << '_' << v * k + j
           << " [label=" << quoted(edge_label(tree.variable(d).levels[j], p)) << "];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

std::string ceg_to_dot(const Ceg& c) {
  const auto& tree = c.tree;
  std::ostringstream os;
  os << "digraph ceg {\n  rankdir=LR;\n  node [shape=circle, style=filled];\n";
  std::vector<std::map<StageId, std::size_t>> stage_index(tree.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& node = c.nodes[i];
    if (i == c.sink()) {
      os << "  u_inf [label=\"u_inf\", fillcolor=\"white\"];\n";
      continue;
    }
    std::string color = kUnobservedColor;
    if (node.stage != c.unobserved_name) {
      auto& idx = stage_index[node.stratum];
      auto [it, inserted] = idx.try_emplace(node.stage, idx.size());
      color = kPalette[it->second % kPalette.size()];
    }
    os << "  " << node_name(c, i) << " [label=" << quoted(node_name(c, i)) << ", fillcolor=" << quoted(color)
       << ", tooltip=" << quoted(tree.variable(node.stratum).name + " stage " + node.stage) << "];\n";
  }
  for (const auto& e : c.edges) {
    const auto& level = tree.variable(c.nodes[e.from].stratum).levels[e.level];
    os << "  " << node_name(c, e.from) << " -> " << node_name(c, e.to)
       << " [label=" << quoted(edge_label(level, e.prob)) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace stagedtrees
