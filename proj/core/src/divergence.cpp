#include "stagedtrees/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagedtrees/errors.hpp"
#include "stagedtrees/format.hpp"

namespace stagedtrees {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kl(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(s, 0.0);
}

double bhattacharyya_coefficient(std::span<const double> p, std::span<const double> q) {
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  return std::min(bc, 1.0);
}

double renyi(std::span<const double> p, std::span<const double> q, double alpha) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    s += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  if (s == 0.0) return kInf;
  return std::max(std::log(s) / (alpha - 1.0), 0.0);
}

double chan_darwiche(std::span<const double> p, std::span<const double> q) {
  double hi = -kInf, lo = kInf;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double ratio;
    if (q[i] == 0.0) {
      if (p[i] != 0.0) return kInf;
      ratio = 1.0;
    } else {
      ratio = p[i] / q[i];
    }
    hi = std::max(hi, ratio);
    lo = std::min(lo, ratio);
  }
  if (lo == 0.0) return kInf;
  return std::log(hi) - std::log(lo);
}

void check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw ValidationError("probability vector has a negative or NaN entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("probability vector does not sum to 1");
}

}  // namespace

DivergenceSpec parse_divergence(std::string_view name) {
  auto parts = split(name, ':');
  const std::string& head = parts[0];
  auto param = [&](double fallback) {
    if (parts.size() < 2) return fallback;
    try {
      return std::stod(parts[1]);
    } catch (const std::exception&) {
      throw ValidationError("bad divergence parameter in '" + std::string(name) + "'");
    }
  };
  DivergenceSpec spec;
  if (head == "kl" || head == "kullback") {
    spec.kind = DivergenceKind::kl_sym;
  } else if (head == "tv") {
    spec.kind = DivergenceKind::tv;
  } else if (head == "hl" || head == "hellinger") {
    spec.kind = DivergenceKind::hellinger;
  } else if (head == "bh" || head == "bhattacharyya") {
    spec.kind = DivergenceKind::bhattacharyya;
  } else if (head == "lp") {
    spec = DivergenceSpec::lp_norm(param(2.0));
  } else if (head == "ry" || head == "renyi") {
    spec = DivergenceSpec::renyi(param(2.0));
  } else if (head == "cd") {
    spec.kind = DivergenceKind::chan_darwiche;
  } else {
    throw ValidationError("unknown distance '" + std::string(name) + "'");
  }
  if (spec.kind == DivergenceKind::lp && !(spec.param >= 1.0)) throw ValidationError("lp needs p >= 1");
  if (spec.kind == DivergenceKind::renyi_sym && (!(spec.param > 0.0) || spec.param == 1.0)) {
    throw ValidationError("renyi needs alpha > 0 and alpha != 1");
  }
  return spec;
}

std::string divergence_name(const DivergenceSpec& spec) {
  switch (spec.kind) {
    case DivergenceKind::kl_sym: return "kl";
    case DivergenceKind::tv: return "tv";
    case DivergenceKind::hellinger: return "hl";
    case DivergenceKind::bhattacharyya: return "bh";
    case DivergenceKind::lp: return "lp:" + format_roundtrip(spec.param);
    case DivergenceKind::renyi_sym: return "ry:" + format_roundtrip(spec.param);
    case DivergenceKind::chan_darwiche: return "cd";
    case DivergenceKind::custom: return "custom";
  }
  return "?";
}

double divergence(const DivergenceSpec& spec, std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("probability vectors differ in length");
  if (p.size() < 2) throw ValidationError("probability vectors need at least two entries");
  check_distribution(p);
  check_distribution(q);
  switch (spec.kind) {
    case DivergenceKind::kl_sym: {
      double a = kl(p, q);
      if (std::isinf(a)) return kInf;
      double b = kl(q, p);
      return a + b;
    }
    case DivergenceKind::tv: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
      return std::min(0.5 * s, 1.0);
    }
    case DivergenceKind::hellinger: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = std::sqrt(p[i]) - std::sqrt(q[i]);
        s += diff * diff;
      }
      return std::min(std::sqrt(0.5 * s), 1.0);
    }
    case DivergenceKind::bhattacharyya: {
      double bc = bhattacharyya_coefficient(p, q);
      return bc == 0.0 ? kInf : std::max(0.0, -std::log(bc));
    }
    case DivergenceKind::lp: {
      if (!(spec.param >= 1.0)) throw ValidationError("lp needs p >= 1");
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) s += std::pow(std::abs(p[i] - q[i]), spec.param);
      return std::pow(s, 1.0 / spec.param);
    }
    case DivergenceKind::renyi_sym: {
      const double a = spec.param;
      if (!(a > 0.0) || a == 1.0) throw ValidationError("renyi needs alpha > 0 and alpha != 1");
      double x = renyi(p, q, a);
      if (std::isinf(x)) return kInf;
      return x + renyi(q, p, a);
    }
    case DivergenceKind::chan_darwiche:
      return chan_darwiche(p, q);
    case DivergenceKind::custom: {
      if (!spec.custom) throw ValidationError("custom divergence has no function");
      double d = spec.custom(p, q);
      if (!(d >= 0.0)) throw ValidationError("custom divergence returned a negative or NaN value");
      return d;
    }
  }
  return kInf;
}

}  // namespace stagedtrees
