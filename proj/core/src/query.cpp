#include "stagedtrees/query.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/format.hpp"
#include "stagedtrees/random.hpp"

namespace stagedtrees {

namespace {

constexpr std::size_t kFree = static_cast<std::size_t>(-1);

void require_fitted(const StagedTree& st) {
  if (!st.fitted()) throw ValidationError("model is not fitted");
}

// Probability vector of vertex v, or null when it sits in the unobserved stage.
const std::vector<double>* floret(const StagedTree& st, std::size_t d, std::size_t v) {
  const auto& id = st.stratum(d).vertex_stage[v];
  if (st.is_unobserved(id)) return nullptr;
  return &*st.stage(d, id).probs;
}

VertexId prefix_vertex(const StagedTree& st, std::span<const std::string> path) {
  if (path.size() > st.tree().size()) throw ValidationError("path is longer than the number of variables");
  return st.tree().encode(path);
}

}  // namespace

LevelPattern to_pattern(const EventTree& tree, const Assignment& event) {
  LevelPattern pattern(tree.size(), kFree);
  for (const auto& [name, level] : event) {
    const auto d = tree.index_of(name);
    pattern[d] = tree.level_index(d, level);
  }
  return pattern;
}

double prob(const StagedTree& st, std::span<const std::size_t> pattern) {
  require_fitted(st);
  const auto& tree = st.tree();
  if (pattern.size() != tree.size()) throw ValidationError("pattern length differs from the number of variables");
  std::size_t depth = 0;
  for (std::size_t d = 0; d < tree.size(); ++d) {
    if (pattern[d] == kFree) continue;
    if (pattern[d] >= tree.cardinality(d)) throw ValidationError("level index out of range");
    depth = d + 1;
  }
  // Florets below the deepest constrained variable sum to one and are skipped.
  std::vector<double> mass{1.0};
  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t k = tree.cardinality(d);
    std::vector<double> next(mass.size() * k, 0.0);
    for (std::size_t v = 0; v < mass.size(); ++v) {
      if (mass[v] == 0.0) continue;
      const auto* p = floret(st, d, v);
      if (!p) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (pattern[d] == kFree || pattern[d] == j) next[v * k + j] = mass[v] * (*p)[j];
      }
    }
    mass = std::move(next);
  }
  double total = 0.0;
  for (double m : mass) total += m;
  return total;
}

double prob(const StagedTree& st, const Assignment& event, bool log) {
  const double p = prob(st, to_pattern(st.tree(), event));
  return log ? std::log(p) : p;
}

double path_probability(const StagedTree& st, std::span<const std::size_t> levels) {
  require_fitted(st);
  const auto& tree = st.tree();
  if (levels.size() != tree.size()) throw ValidationError("a full path is required");
  double p = 1.0;
  std::size_t v = 0;
  for (std::size_t d = 0; d < tree.size(); ++d) {
    const auto* f = floret(st, d, v);
    if (!f) return 0.0;
    if (levels[d] >= f->size()) throw ValidationError("level index out of range");
    p *= (*f)[levels[d]];
    v = v * tree.cardinality(d) + levels[d];
  }
  return p;
}

std::vector<Atom> atomic_probs(const StagedTree& st) {
  require_fitted(st);
  const auto& tree = st.tree();
  std::vector<double> mass{1.0};
  for (std::size_t d = 0; d < tree.size(); ++d) {
    const std::size_t k = tree.cardinality(d);
    std::vector<double> next(mass.size() * k, 0.0);
    for (std::size_t v = 0; v < mass.size(); ++v) {
      const auto* p = floret(st, d, v);
      if (!p) continue;
      for (std::size_t j = 0; j < k; ++j) next[v * k + j] = mass[v] * (*p)[j];
    }
    mass = std::move(next);
  }
  std::vector<Atom> atoms(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    atoms[i].levels = tree.decode_levels({tree.size(), i});
    atoms[i].prob = mass[i];
  }
  return atoms;
}

std::vector<Record> sample_from(const StagedTree& st, std::size_t n, std::uint64_t seed) {
  require_fitted(st);
  const auto& tree = st.tree();
  const std::size_t depth = tree.size();
  // reach[d][v]: probability of completing a walk from v without meeting an
  // unobserved stage.
  std::vector<std::vector<double>> reach(depth + 1);
  reach[depth].assign(tree.num_leaves(), 1.0);
  for (std::size_t d = depth; d-- > 0;) {
    const std::size_t k = tree.cardinality(d);
    reach[d].assign(tree.stratum_size(d), 0.0);
    for (std::size_t v = 0; v < reach[d].size(); ++v) {
      const auto* p = floret(st, d, v);
      if (!p) continue;
      for (std::size_t j = 0; j < k; ++j) reach[d][v] += (*p)[j] * reach[d + 1][v * k + j];
    }
  }
  if (!(reach[0][0] > 0.0)) throw NumericError("every path of the model passes through an unobserved stage");

  Rng rng(seed);
  std::vector<Record> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record rec(depth);
    std::size_t v = 0;
    for (std::size_t d = 0; d < depth; ++d) {
      const std::size_t k = tree.cardinality(d);
      const auto& p = *floret(st, d, v);
      const double u = rng.uniform() * reach[d][v];
      double acc = 0.0;
      std::size_t pick = k;
      std::size_t last = k;
      for (std::size_t j = 0; j < k; ++j) {
        const double w = p[j] * reach[d + 1][v * k + j];
        if (w <= 0.0) continue;
        last = j;
        acc += w;
        if (u < acc) {
          pick = j;
          break;
        }
      }
      if (pick == k) pick = last;  // rounding at the top of the range
      rec[d] = pick;
      v = v * k + pick;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

StageId get_stage(const StagedTree& st, std::span<const std::string> path) {
  if (path.empty()) throw ValidationError("path must name at least one level");
  if (path.size() >= st.tree().size()) throw ValidationError("a full path reaches a leaf, which has no stage");
  return st.stage_of(prefix_vertex(st, path));
}

std::vector<Path> get_path(const StagedTree& st, std::string_view var, const StageId& stage) {
  const auto d = st.tree().index_of(var);
  if (d == 0) throw ValidationError("'" + std::string(var) + "' is the root variable; no path precedes it");
  if (!st.has_stage(d, stage)) {
    throw ValidationError("unknown stage '" + stage + "' for variable '" + std::string(var) + "'");
  }
  std::vector<Path> out;
  for (auto v : st.members(d, stage)) out.push_back(st.tree().decode({d, v}));
  return out;
}

StagedTree subtree(const StagedTree& st, std::span<const std::string> path) {
  const auto& tree = st.tree();
  if (path.empty()) return st;
  if (path.size() >= tree.size()) throw ValidationError("subtree needs a prefix shorter than the number of variables");
  const VertexId top = prefix_vertex(st, path);
  const std::size_t p = top.stratum;
  if (st.is_unobserved(st.stage_of(top))) throw ValidationError("the prefix reaches an unobserved vertex");

  std::vector<Variable> vars(tree.variables().begin() + static_cast<std::ptrdiff_t>(p), tree.variables().end());
  EventTree sub(std::move(vars));
  std::vector<Stratum> strata(sub.size());
  for (std::size_t e = 0; e < sub.size(); ++e) {
    const auto& src = st.stratum(p + e);
    const std::size_t k = sub.cardinality(e);
    const std::size_t width = sub.stratum_size(e);
    const std::size_t first = top.index * width;
    auto& dst = strata[e];
    dst.vertex_stage.assign(src.vertex_stage.begin() + static_cast<std::ptrdiff_t>(first),
                            src.vertex_stage.begin() + static_cast<std::ptrdiff_t>(first + width));
    if (src.has_counts()) {
      dst.vertex_counts.assign(src.vertex_counts.begin() + static_cast<std::ptrdiff_t>(first * k),
                               src.vertex_counts.begin() + static_cast<std::ptrdiff_t>((first + width) * k));
    }
    for (std::size_t v = 0; v < width; ++v) {
      const auto& id = dst.vertex_stage[v];
      auto [it, inserted] = dst.stages.try_emplace(id);
      if (inserted) {
        it->second.probs = src.stages.at(id).probs;
        if (!src.stages.at(id).counts.empty()) it->second.counts.assign(k, 0.0);
      }
      if (dst.has_counts() && !it->second.counts.empty()) {
        auto c = dst.counts_of(v, k);
        for (std::size_t j = 0; j < k; ++j) it->second.counts[j] += c[j];
      }
    }
  }
  return StagedTree(std::move(sub), std::move(strata), st.lambda(), st.unobserved_name(), st.fitted());
}

CompareMethod parse_compare_method(std::string_view name) {
  if (name == "stages") return CompareMethod::stages;
  if (name == "naive") return CompareMethod::naive;
  if (name == "hamming") return CompareMethod::hamming;
  throw ValidationError("unknown comparison method '" + std::string(name) + "'");
}

bool StageDiff::empty() const {
  return std::all_of(vertices.begin(), vertices.end(), [](const auto& v) { return v.empty(); });
}

namespace {

// First member vertex of each vertex's stage, plus the stage sizes.
struct Blocks {
  std::vector<std::size_t> rep;
  std::vector<std::size_t> size;
};

Blocks blocks_of(const Stratum& s) {
  Blocks b;
  std::unordered_map<StageId, std::size_t> first;
  std::unordered_map<StageId, std::size_t> count;
  for (std::size_t v = 0; v < s.num_vertices(); ++v) {
    first.try_emplace(s.vertex_stage[v], v);
    ++count[s.vertex_stage[v]];
  }
  for (std::size_t v = 0; v < s.num_vertices(); ++v) {
    b.rep.push_back(first[s.vertex_stage[v]]);
    b.size.push_back(count[s.vertex_stage[v]]);
  }
  return b;
}

}  // namespace

Comparison compare_stages(const StagedTree& a, const StagedTree& b, CompareMethod method) {
  if (!(a.tree() == b.tree())) {
    throw ValidationError("models have different variables, levels or order and cannot be compared");
  }
  const std::size_t n = a.tree().size();
  Comparison out;
  out.diff.vertices.resize(n);

  if (method == CompareMethod::hamming) {
    const auto sa = stndnaming(a);
    const auto sb = stndnaming(b);
    for (std::size_t d = 0; d < n; ++d) {
      const auto& la = sa.stratum(d).vertex_stage;
      const auto& lb = sb.stratum(d).vertex_stage;
      for (std::size_t v = 0; v < la.size(); ++v) {
        const bool na_a = sa.is_unobserved(la[v]);
        const bool na_b = sb.is_unobserved(lb[v]);
        if (na_a != na_b || (!na_a && la[v] != lb[v])) out.diff.vertices[d].push_back(v);
      }
    }
    out.equal = out.diff.empty();
    return out;
  }

  bool equal = true;
  for (std::size_t d = 0; d < n; ++d) {
    const auto ba = blocks_of(a.stratum(d));
    const auto bb = blocks_of(b.stratum(d));
    const std::size_t m = ba.rep.size();
    if (method == CompareMethod::stages) {
      // A vertex's blocks agree iff both have the size of their intersection.
      std::map<std::pair<std::size_t, std::size_t>, std::size_t> meet;
      for (std::size_t v = 0; v < m; ++v) ++meet[{ba.rep[v], bb.rep[v]}];
      for (std::size_t v = 0; v < m; ++v) {
        const auto common = meet[{ba.rep[v], bb.rep[v]}];
        if (common != ba.size[v] || common != bb.size[v]) out.diff.vertices[d].push_back(v);
      }
      if (!out.diff.vertices[d].empty()) equal = false;
    } else {
      auto sizes = [](const Blocks& bl) {
        std::vector<std::size_t> s;
        for (std::size_t v = 0; v < bl.rep.size(); ++v) {
          if (bl.rep[v] == v) s.push_back(bl.size[v]);
        }
        std::sort(s.begin(), s.end());
        return s;
      };
      if (sizes(ba) == sizes(bb)) continue;
      equal = false;
      for (std::size_t v = 0; v < m; ++v) {
        if (ba.size[v] != bb.size[v]) out.diff.vertices[d].push_back(v);
      }
    }
  }
  out.equal = equal;
  return out;
}

StagedTree stndnaming(const StagedTree& st) {
  std::vector<Stratum> strata = st.strata();
  for (std::size_t d = 0; d < strata.size(); ++d) {
    auto& s = strata[d];
    std::map<StageId, StageId> rename;
    std::size_t next = 1;
    for (const auto& id : st.observed_stages(d)) rename[id] = std::to_string(next++);
    std::map<StageId, Stage> stages;
    for (auto& [id, stage] : s.stages) {
      const auto it = rename.find(id);
      stages.emplace(it == rename.end() ? id : it->second, std::move(stage));
    }
    for (auto& id : s.vertex_stage) {
      if (const auto it = rename.find(id); it != rename.end()) id = it->second;
    }
    s.stages = std::move(stages);
  }
  return StagedTree(st.tree(), std::move(strata), st.lambda(), st.unobserved_name(), st.fitted());
}

std::vector<SummaryStratum> summary(const StagedTree& st) {
  require_fitted(st);
  std::vector<SummaryStratum> out;
  for (std::size_t d = 0; d < st.tree().size(); ++d) {
    SummaryStratum ss;
    ss.variable = st.tree().variable(d).name;
    ss.levels = st.tree().variable(d).levels;
    auto ids = st.observed_stages(d);
    if (st.has_unobserved(d)) ids.push_back(st.unobserved_name());
    for (const auto& id : ids) {
      const auto& stage = st.stage(d, id);
      SummaryRow row;
      row.stage = id;
      row.npaths = d == 0 ? 0 : st.members(d, id).size();
      row.sample_size = stage.total();
      row.probs = stage.probs;
      ss.rows.push_back(std::move(row));
    }
    out.push_back(std::move(ss));
  }
  return out;
}

std::string format_summary(const StagedTree& st) {
  std::ostringstream os;
  os << "lambda: " << format_roundtrip(st.lambda()) << "\n";
  for (const auto& ss : summary(st)) {
    os << "Variable: " << ss.variable << "\n";
    os << "stage\tnpaths\tsample.size";
    for (const auto& l : ss.levels) os << '\t' << l;
    os << "\n";
    for (const auto& row : ss.rows) {
      os << row.stage << '\t' << row.npaths << '\t' << format_roundtrip(row.sample_size);
      for (std::size_t j = 0; j < ss.levels.size(); ++j) {
        os << '\t' << (row.probs ? format_fixed((*row.probs)[j], 7) : std::string("NA"));
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace stagedtrees
