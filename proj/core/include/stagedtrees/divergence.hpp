#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace stagedtrees {

enum class DivergenceKind { kl_sym, tv, hellinger, bhattacharyya, lp, renyi_sym, chan_darwiche, custom };

using DivergenceFn = std::function<double(std::span<const double>, std::span<const double>)>;

/// A distance between two floret probability vectors.
///
///   kl_sym         KL(p||q) + KL(q||p), with 0 ln(0/x) = 0 and x ln(x/0) = +inf
///   tv             1/2 sum |p - q|
///   hellinger      sqrt(1 - sum sqrt(p q))
///   bhattacharyya  -ln sum sqrt(p q)
///   lp             (sum |p - q|^p)^(1/p), p >= 1
///   renyi_sym      D_a(p||q) + D_a(q||p), D_a = ln(sum p^a q^(1-a)) / (a - 1), a > 0, a != 1
///   chan_darwiche  ln max(p/q) - ln min(p/q), with 0/0 = 1 and x/0 = +inf
struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::kl_sym;
  /// p for lp, alpha for renyi_sym.
  double param = 0.0;
  DivergenceFn custom;

  static DivergenceSpec kl() { return {}; }
  static DivergenceSpec lp_norm(double p) { return {DivergenceKind::lp, p, {}}; }
  static DivergenceSpec renyi(double alpha = 2.0) { return {DivergenceKind::renyi_sym, alpha, {}}; }
  static DivergenceSpec user(DivergenceFn fn) { return {DivergenceKind::custom, 0.0, std::move(fn)}; }
};

/// Accepts the short names kl, tv, hl, bh, lp[:p], ry[:alpha], cd.
DivergenceSpec parse_divergence(std::string_view name);
std::string divergence_name(const DivergenceSpec& spec);

/// Non-negative, symmetric, possibly +inf. Throws ValidationError on a length
/// mismatch, vectors that are not distributions, or a bad parameter.
double divergence(const DivergenceSpec& spec, std::span<const double> p, std::span<const double> q);

}  // namespace stagedtrees
