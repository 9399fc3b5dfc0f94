#include "stagedtrees/learning.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/estimation.hpp"
#include "stagedtrees/random.hpp"

namespace stagedtrees {

namespace {

// Gains at or below this are treated as no improvement.
constexpr double kMinGain = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-stage contribution to the search score: weight * loglik - penalty * (k - 1).
struct Scorer {
  double weight = 2.0;
  double penalty = 0.0;
  double lambda = 0.0;

  Scorer(const StagedTree& st, ScoreKind kind) : lambda(st.lambda()) {
    switch (kind) {
      case ScoreKind::neg_bic:
        penalty = std::log(st.total_count());
        break;
      case ScoreKind::neg_aic:
        penalty = 2.0;
        break;
      case ScoreKind::loglik:
        weight = 1.0;
        break;
    }
  }

  double loglik(const std::vector<double>& c) const {
    const double m = std::accumulate(c.begin(), c.end(), 0.0);
    const double denom = m + lambda * static_cast<double>(c.size());
    if (denom <= 0.0) return 0.0;
    double ll = 0.0;
    for (double x : c) {
      if (x > 0.0) ll += x * std::log((x + lambda) / denom);
    }
    return ll;
  }

  double term(const std::vector<double>& c) const {
    return weight * loglik(c) - penalty * static_cast<double>(c.size() - 1);
  }
};

struct WorkStage {
  StageId label;  // empty for stages created by the search
  std::vector<std::size_t> members;
  std::vector<double> counts;
  double term = 0.0;
};

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

// Working copy of one stratum: observed stages in first-member order, plus
// the owner stage of every observed vertex (-1 for unobserved vertices).
class StratumSearch {
 public:
  StratumSearch(const StagedTree& st, std::size_t d, const Scorer& scorer)
      : tree_(&st), d_(d), k_(st.tree().cardinality(d)), scorer_(&scorer) {
    const auto& s = st.stratum(d);
    has_vertex_counts_ = s.has_counts();
    owner_.assign(s.num_vertices(), -1);
    for (const auto& id : st.observed_stages(d)) {
      WorkStage ws;
      ws.label = id;
      ws.members = st.members(d, id);
      ws.counts = st.stage(d, id).counts;
      if (ws.counts.empty()) throw ValidationError("structure search needs a model with counts");
      for (auto v : ws.members) owner_[v] = static_cast<int>(stages_.size());
      ws.term = scorer.term(ws.counts);
      stages_.push_back(std::move(ws));
    }
  }

  std::size_t num_stages() const { return stages_.size(); }
  const WorkStage& stage(std::size_t i) const { return stages_[i]; }
  std::size_t num_vertices() const { return owner_.size(); }
  int owner(std::size_t v) const { return owner_[v]; }
  bool has_vertex_counts() const { return has_vertex_counts_; }

  double join_gain(std::size_t a, std::size_t b) const {
    return scorer_->term(add(stages_[a].counts, stages_[b].counts)) - stages_[a].term - stages_[b].term;
  }

  void join(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    auto& keep = stages_[a];
    auto& gone = stages_[b];
    keep.members.insert(keep.members.end(), gone.members.begin(), gone.members.end());
    std::sort(keep.members.begin(), keep.members.end());
    keep.counts = has_vertex_counts_ ? sum_members(keep.members) : add(keep.counts, gone.counts);
    keep.term = scorer_->term(keep.counts);
    erase(b);
    check();
  }

  std::span<const double> vertex_counts(std::size_t v) const {
    return tree_->stratum(d_).counts_of(v, k_);
  }

  // Score change of moving vertex v into stage `target` (num_stages() = new stage).
  double move_gain(std::size_t v, std::size_t target) const {
    const auto src = static_cast<std::size_t>(owner_[v]);
    auto x = vertex_counts(v);
    const auto& from = stages_[src];
    double gain = -from.term;
    if (from.members.size() > 1) {
      std::vector<double> rest(k_);
      for (std::size_t j = 0; j < k_; ++j) rest[j] = std::max(0.0, from.counts[j] - x[j]);
      gain += scorer_->term(rest);
    }
    std::vector<double> xv(x.begin(), x.end());
    if (target == stages_.size()) return gain + scorer_->term(xv);
    const auto& to = stages_[target];
    return gain + scorer_->term(add(to.counts, xv)) - to.term;
  }

  void move(std::size_t v, std::size_t target) {
    const auto src = static_cast<std::size_t>(owner_[v]);
    if (target == stages_.size()) stages_.push_back(WorkStage{});
    auto& to = stages_[target];
    to.members.insert(std::lower_bound(to.members.begin(), to.members.end(), v), v);
    to.counts = sum_members(to.members);
    to.term = scorer_->term(to.counts);
    owner_[v] = static_cast<int>(target);
    auto& from = stages_[src];
    from.members.erase(std::find(from.members.begin(), from.members.end(), v));
    if (from.members.empty()) {
      erase(src);
    } else {
      from.counts = sum_members(from.members);
      from.term = scorer_->term(from.counts);
    }
    check();
  }

  /// Replaces the observed staging by the given groups of current stages.
  void regroup(const std::vector<std::vector<std::size_t>>& groups) {
    std::vector<WorkStage> next;
    for (const auto& g : groups) {
      if (g.empty()) continue;
      WorkStage ws;
      ws.label = stages_[g.front()].label;
      for (auto i : g) ws.members.insert(ws.members.end(), stages_[i].members.begin(), stages_[i].members.end());
      std::sort(ws.members.begin(), ws.members.end());
      if (has_vertex_counts_) {
        ws.counts = sum_members(ws.members);
      } else {
        ws.counts.assign(k_, 0.0);
        for (auto i : g) ws.counts = add(ws.counts, stages_[i].counts);
      }
      ws.term = scorer_->term(ws.counts);
      next.push_back(std::move(ws));
    }
    // Keep first-member order and the label of the earliest stage.
    std::sort(next.begin(), next.end(),
              [](const WorkStage& a, const WorkStage& b) { return a.members.front() < b.members.front(); });
    stages_ = std::move(next);
    std::fill(owner_.begin(), owner_.end(), -1);
    for (std::size_t i = 0; i < stages_.size(); ++i) {
      for (auto v : stages_[i].members) owner_[v] = static_cast<int>(i);
    }
  }

  std::vector<double> probs(std::size_t i) const { return estimate_probs(stages_[i].counts, scorer_->lambda); }

  void write_back(Stratum& out, const std::string& unobserved) const {
    std::map<StageId, Stage> stages;
    if (auto it = out.stages.find(unobserved); it != out.stages.end()) stages.emplace(*it);
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
      if (stages_[i].label.empty() || stages.count(stages_[i].label)) {
        fresh.push_back(i);
        continue;
      }
      stages.emplace(stages_[i].label, Stage{});
    }
    std::vector<StageId> labels(stages_.size());
    for (std::size_t i = 0; i < stages_.size(); ++i) labels[i] = stages_[i].label;
    for (auto i : fresh) {
      labels[i] = fresh_stage_label(stages, unobserved);
      stages.emplace(labels[i], Stage{});
    }
    for (std::size_t i = 0; i < stages_.size(); ++i) {
      auto& stage = stages.at(labels[i]);
      stage.counts = stages_[i].counts;
      stage.probs = estimate_probs(stages_[i].counts, scorer_->lambda);
      for (auto v : stages_[i].members) out.vertex_stage[v] = labels[i];
    }
    out.stages = std::move(stages);
  }

  double total() const {
    double t = 0.0;
    for (const auto& s : stages_) t += s.term;
    return t;
  }

 private:
  std::vector<double> sum_members(const std::vector<std::size_t>& members) const {
    std::vector<double> c(k_, 0.0);
    for (auto v : members) {
      auto x = vertex_counts(v);
      for (std::size_t j = 0; j < k_; ++j) c[j] += x[j];
    }
    return c;
  }

  void erase(std::size_t i) {
    stages_.erase(stages_.begin() + static_cast<std::ptrdiff_t>(i));
    for (auto& o : owner_) {
      if (o > static_cast<int>(i)) --o;
    }
  }

  // Debug builds recompute every stage term from scratch after each move.
  void check() const {
#ifndef NDEBUG
    for (const auto& s : stages_) {
      const double fresh = scorer_->term(has_vertex_counts_ ? sum_members(s.members) : s.counts);
      assert(std::abs(fresh - s.term) <= 1e-7 * std::max(1.0, std::abs(fresh)));
    }
#endif
  }

  const StagedTree* tree_;
  std::size_t d_;
  std::size_t k_;
  const Scorer* scorer_;
  bool has_vertex_counts_ = false;
  std::vector<WorkStage> stages_;
  std::vector<int> owner_;
};

void require_fitted(const StagedTree& st) {
  if (!st.fitted()) throw ValidationError("structure search needs a fitted model");
}

std::vector<std::size_t> scoped_strata(const StagedTree& st, const SearchConfig& cfg) {
  std::vector<std::size_t> out;
  if (!cfg.scope) {
    for (std::size_t d = 1; d < st.tree().size(); ++d) out.push_back(d);
    return out;
  }
  for (const auto& name : *cfg.scope) out.push_back(st.tree().index_of(name));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase(out, std::size_t{0});  // the root is always alone
  return out;
}

// Runs `body` on a working copy of each scoped stratum and rebuilds the model.
template <typename Body>
StagedTree per_stratum(const StagedTree& st, const SearchConfig& cfg, Body body) {
  require_fitted(st);
  const Scorer scorer(st, cfg.score);
  std::vector<Stratum> strata = st.strata();
  for (auto d : scoped_strata(st, cfg)) {
    StratumSearch search(st, d, scorer);
    body(search, d);
    search.write_back(strata[d], st.unobserved_name());
  }
  return StagedTree(st.tree(), std::move(strata), st.lambda(), st.unobserved_name(), true);
}

void best_join_loop(StratumSearch& s) {
  while (s.num_stages() > 1) {
    double best = kMinGain;
    std::size_t ba = 0, bb = 0;
    bool found = false;
    for (std::size_t a = 0; a < s.num_stages(); ++a) {
      for (std::size_t b = a + 1; b < s.num_stages(); ++b) {
        const double g = s.join_gain(a, b);
        if (g > best) {
          best = g;
          ba = a;
          bb = b;
          found = true;
        }
      }
    }
    if (!found) return;
    s.join(ba, bb);
  }
}

void first_join_loop(StratumSearch& s) {
  bool joined = true;
  while (joined && s.num_stages() > 1) {
    joined = false;
    for (std::size_t a = 0; a < s.num_stages() && !joined; ++a) {
      for (std::size_t b = a + 1; b < s.num_stages(); ++b) {
        if (s.join_gain(a, b) > kMinGain) {
          s.join(a, b);
          joined = true;
          break;
        }
      }
    }
  }
}

void hill_climb(StratumSearch& s) {
  if (!s.has_vertex_counts()) throw ValidationError("stages_hc needs per-vertex counts (refit the model on data)");
  while (true) {
    double best = kMinGain;
    std::size_t bv = 0, bt = 0;
    bool found = false;
    for (std::size_t v = 0; v < s.num_vertices(); ++v) {
      if (s.owner(v) < 0) continue;
      const auto src = static_cast<std::size_t>(s.owner(v));
      for (std::size_t t = 0; t < s.num_stages(); ++t) {
        if (t == src) continue;
        const double g = s.move_gain(v, t);
        if (g > best) {
          best = g;
          bv = v;
          bt = t;
          found = true;
        }
      }
      if (s.stage(src).members.size() > 1) {
        const double g = s.move_gain(v, s.num_stages());
        if (g > best) {
          best = g;
          bv = v;
          bt = s.num_stages();
          found = true;
        }
      }
    }
    if (!found) return;
    s.move(bv, bt);
  }
}

std::vector<std::vector<double>> stage_probs(const StratumSearch& s) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < s.num_stages(); ++i) out.push_back(s.probs(i));
  return out;
}

void check_k(const StratumSearch& s, std::size_t k, std::size_t d, const StagedTree& st) {
  if (k == 0) throw ValidationError("k must be positive");
  if (k > s.num_stages()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(s.num_stages()) +
                          " observed stages of '" + st.tree().variable(d).name + "'");
  }
}

double linkage_distance(const std::vector<std::vector<double>>& dist, const std::vector<std::size_t>& a,
                        const std::vector<std::size_t>& b, Linkage linkage) {
  double acc = linkage == Linkage::single ? kInf : 0.0;
  for (auto i : a) {
    for (auto j : b) {
      const double x = dist[i][j];
      switch (linkage) {
        case Linkage::complete: acc = std::max(acc, x); break;
        case Linkage::single: acc = std::min(acc, x); break;
        case Linkage::average: acc += x; break;
      }
    }
  }
  if (linkage == Linkage::average) acc /= static_cast<double>(a.size() * b.size());
  return acc;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

struct Clustering {
  std::vector<std::size_t> assignment;
  double wcss = kInf;
};

Clustering lloyd(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::vector<double>> centers;
  for (std::size_t i = 0; i < k; ++i) centers.push_back(points[idx[i]]);

  Clustering c;
  c.assignment.assign(n, k);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t best = 0;
      double bd = kInf;
      for (std::size_t j = 0; j < k; ++j) {
        const double dd = squared_distance(points[p], centers[j]);
        if (dd < bd) {
          bd = dd;
          best = j;
        }
      }
      if (c.assignment[p] != best) {
        c.assignment[p] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> mean(points[0].size(), 0.0);
      std::size_t count = 0;
      for (std::size_t p = 0; p < n; ++p) {
        if (c.assignment[p] != j) continue;
        for (std::size_t l = 0; l < mean.size(); ++l) mean[l] += points[p][l];
        ++count;
      }
      if (count == 0) continue;  // an empty cluster keeps its centre
      for (auto& m : mean) m /= static_cast<double>(count);
      centers[j] = std::move(mean);
    }
  }
  c.wcss = 0.0;
  for (std::size_t p = 0; p < n; ++p) c.wcss += squared_distance(points[p], centers[c.assignment[p]]);
  return c;
}

}  // namespace

ScoreKind parse_score(std::string_view name) {
  if (name == "bic" || name == "neg_bic") return ScoreKind::neg_bic;
  if (name == "aic" || name == "neg_aic") return ScoreKind::neg_aic;
  if (name == "loglik") return ScoreKind::loglik;
  throw ValidationError("unknown score '" + std::string(name) + "'");
}

Linkage parse_linkage(std::string_view name) {
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  if (name == "average") return Linkage::average;
  throw ValidationError("unknown linkage '" + std::string(name) + "'");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hc") return Algorithm::hc;
  if (name == "bhc") return Algorithm::bhc;
  if (name == "fbhc") return Algorithm::fbhc;
  if (name == "bhcr") return Algorithm::bhcr;
  if (name == "bj") return Algorithm::bj;
  if (name == "hclust") return Algorithm::hclust;
  if (name == "kmeans") return Algorithm::kmeans;
  throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::hc: return "hc";
    case Algorithm::bhc: return "bhc";
    case Algorithm::fbhc: return "fbhc";
    case Algorithm::bhcr: return "bhcr";
    case Algorithm::bj: return "bj";
    case Algorithm::hclust: return "hclust";
    case Algorithm::kmeans: return "kmeans";
  }
  return "?";
}

double search_score(const StagedTree& st, ScoreKind kind) {
  switch (kind) {
    case ScoreKind::neg_bic: return -bic(st);
    case ScoreKind::neg_aic: return -aic(st);
    case ScoreKind::loglik: return loglik(st);
  }
  return 0.0;
}

StagedTree join_stages(const StagedTree& st, std::size_t stratum, const StageId& a, const StageId& b) {
  if (stratum >= st.tree().size()) throw ValidationError("stratum out of range");
  if (a == b) throw ValidationError("cannot join a stage with itself");
  if (st.is_unobserved(a) || st.is_unobserved(b)) throw ValidationError("the unobserved stage cannot be joined");
  st.stage(stratum, a);
  st.stage(stratum, b);

  std::vector<Stratum> strata = st.strata();
  auto& s = strata[stratum];
  for (auto& id : s.vertex_stage) {
    if (id == b) id = a;
  }
  auto& keep = s.stages.at(a);
  const auto& gone = s.stages.at(b);
  if (!keep.counts.empty() && !gone.counts.empty()) {
    keep.counts = add(keep.counts, gone.counts);
    if (st.fitted()) keep.probs = estimate_probs(keep.counts, st.lambda());
  } else {
    keep.probs.reset();
  }
  s.stages.erase(b);
  const bool fitted = st.fitted() && keep.probs.has_value();
  return StagedTree(st.tree(), std::move(strata), st.lambda(), st.unobserved_name(), fitted);
}

StagedTree stages_hc(const StagedTree& st, const SearchConfig& cfg) {
  return per_stratum(st, cfg, [](StratumSearch& s, std::size_t) { hill_climb(s); });
}

StagedTree stages_bhc(const StagedTree& st, const SearchConfig& cfg) {
  return per_stratum(st, cfg, [](StratumSearch& s, std::size_t) { best_join_loop(s); });
}

StagedTree stages_fbhc(const StagedTree& st, const SearchConfig& cfg) {
  return per_stratum(st, cfg, [](StratumSearch& s, std::size_t) { first_join_loop(s); });
}

StagedTree stages_bhcr(const StagedTree& st, const SearchConfig& cfg) {
  require_fitted(st);
  const Scorer scorer(st, cfg.score);
  const auto scope = scoped_strata(st, cfg);
  std::vector<StratumSearch> searches;
  for (auto d : scope) searches.emplace_back(st, d, scorer);
  Rng rng(cfg.seed);
  for (std::size_t iter = 0; iter < cfg.max_iter && !scope.empty(); ++iter) {
    auto& s = searches[rng.below(scope.size())];
    const std::size_t m = s.num_stages();
    if (m < 2) continue;
    const auto a = static_cast<std::size_t>(rng.below(m));
    auto b = static_cast<std::size_t>(rng.below(m - 1));
    if (b >= a) ++b;
    if (s.join_gain(a, b) > kMinGain) s.join(a, b);
  }
  std::vector<Stratum> strata = st.strata();
  for (std::size_t i = 0; i < scope.size(); ++i) searches[i].write_back(strata[scope[i]], st.unobserved_name());
  return StagedTree(st.tree(), std::move(strata), st.lambda(), st.unobserved_name(), true);
}

StagedTree stages_bj(const StagedTree& st, const SearchConfig& cfg) {
  return per_stratum(st, cfg, [&](StratumSearch& s, std::size_t) {
    while (s.num_stages() > 1) {
      const auto probs = stage_probs(s);
      double best = kInf;
      std::size_t ba = 0, bb = 0;
      for (std::size_t a = 0; a < probs.size(); ++a) {
        for (std::size_t b = a + 1; b < probs.size(); ++b) {
          const double dd = divergence(cfg.distance, probs[a], probs[b]);
          if (dd < best) {
            best = dd;
            ba = a;
            bb = b;
          }
        }
      }
      if (!(best < cfg.thr)) return;
      s.join(ba, bb);
    }
  });
}

StagedTree stages_hclust(const StagedTree& st, const SearchConfig& cfg) {
  return per_stratum(st, cfg, [&](StratumSearch& s, std::size_t d) {
    check_k(s, cfg.k, d, st);
    const auto probs = stage_probs(s);
    const std::size_t n = probs.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = divergence(cfg.distance, probs[i], probs[j]);
    }
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
    while (clusters.size() > cfg.k) {
      // Infinite linkages merge last; among them the lowest pair is taken.
      double best = kInf;
      std::size_t ba = 0, bb = 1;
      for (std::size_t a = 0; a < clusters.size(); ++a) {
        for (std::size_t b = a + 1; b < clusters.size(); ++b) {
          const double x = linkage_distance(dist, clusters[a], clusters[b], cfg.linkage);
          if (x < best) {
            best = x;
            ba = a;
            bb = b;
          }
        }
      }
      clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
      std::sort(clusters[ba].begin(), clusters[ba].end());
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    s.regroup(clusters);
  });
}

StagedTree stages_kmeans(const StagedTree& st, const SearchConfig& cfg) {
  if (cfg.n_restarts == 0) throw ValidationError("n_restarts must be positive");
  return per_stratum(st, cfg, [&](StratumSearch& s, std::size_t d) {
    check_k(s, cfg.k, d, st);
    const auto probs = stage_probs(s);
    const std::size_t n = probs.size();
    std::vector<std::vector<std::size_t>> groups;
    if (cfg.k == n) {
      for (std::size_t i = 0; i < n; ++i) groups.push_back({i});
    } else {
      Clustering best;
      for (std::size_t r = 0; r < cfg.n_restarts; ++r) {
        Rng rng(derive_seed(cfg.seed, d * 1000003ULL + r));
        Clustering c = lloyd(probs, cfg.k, rng);
        if (c.wcss < best.wcss) best = std::move(c);
      }
      groups.assign(cfg.k, {});
      for (std::size_t i = 0; i < n; ++i) groups[best.assignment[i]].push_back(i);
    }
    s.regroup(groups);
  });
}

StagedTree learn(const StagedTree& st, Algorithm alg, const SearchConfig& cfg) {
  switch (alg) {
    case Algorithm::hc: return stages_hc(st, cfg);
    case Algorithm::bhc: return stages_bhc(st, cfg);
    case Algorithm::fbhc: return stages_fbhc(st, cfg);
    case Algorithm::bhcr: return stages_bhcr(st, cfg);
    case Algorithm::bj: return stages_bj(st, cfg);
    case Algorithm::hclust: return stages_hclust(st, cfg);
    case Algorithm::kmeans: return stages_kmeans(st, cfg);
  }
  throw ValidationError("unknown algorithm");
}

}  // namespace stagedtrees
