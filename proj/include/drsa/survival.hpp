#pragma once

// Discrete-time survival algebra: conditional hazards h_l composed by the
// probability chain rule into survival S, event rate W = 1 - S and event
// probability p_l, plus the three likelihood losses and their analytic
// gradients with respect to the hazards.
//
// Every hazard is clamped to [kHazardFloor, kHazardCeil] before use, and W / p
// are clamped at kProbFloor before a log is taken. Gradients are those of the
// clamped function, so an entry pinned by the clamp receives zero gradient.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drsa/core.hpp"

namespace drsa {

namespace detail {

inline void check_hazards(const HazardSequence& h) {
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double v = h.values[k];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("hazard " + std::to_string(k + 1) + " outside [0,1]: " +
                                  std::to_string(v));
    }
  }
}

inline void check_index(std::size_t l, std::size_t n, const char* what) {
  if (l < 1 || l > n) {
    throw std::out_of_range(std::string(what) + ": interval index " + std::to_string(l) +
                            " outside [1, " + std::to_string(n) + "]");
  }
}

inline bool in_clamp(double h) { return h >= kHazardFloor && h <= kHazardCeil; }

/// Running sum of log(1 - h_j), j = 1..k, for k = 0..n (n+1 entries).
inline std::vector<double> log_survival_prefix(const HazardSequence& h) {
  std::vector<double> out(h.size() + 1, 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    out[k + 1] = out[k] + std::log1p(-clamp_hazard(h.values[k]));
  }
  return out;
}

}  // namespace detail

/// S(t_l) = prod_{j<=l} (1 - h_j), accumulated in log space.
inline SurvivalCurve survival_from_hazards(const HazardSequence& h) {
  detail::check_hazards(h);
  const auto logs = detail::log_survival_prefix(h);
  SurvivalCurve s;
  s.values.resize(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) s.values[k] = std::exp(logs[k + 1]);
  return s;
}

/// W(t_l) = 1 - S(t_l).
inline std::vector<double> event_rate_from_hazards(const HazardSequence& h) {
  auto s = survival_from_hazards(h);
  std::vector<double> w(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) w[k] = 1.0 - s.values[k];
  return w;
}

/// p_l = h_l * prod_{j<l} (1 - h_j), l is 1-based.
inline double event_prob_at(const HazardSequence& h, std::size_t l) {
  detail::check_hazards(h);
  detail::check_index(l, h.size(), "event_prob_at");
  double log_prefix = 0.0;
  for (std::size_t j = 0; j + 1 < l; ++j) log_prefix += std::log1p(-clamp_hazard(h.values[j]));
  return clamp_hazard(h.values[l - 1]) * std::exp(log_prefix);
}

/// All p_1..p_n at once.
inline std::vector<double> event_probs(const HazardSequence& h) {
  detail::check_hazards(h);
  const auto logs = detail::log_survival_prefix(h);
  std::vector<double> p(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    p[k] = clamp_hazard(h.values[k]) * std::exp(logs[k]);
  }
  return p;
}

/// Per-interval quantities of a prediction over the full grid.
struct CurvePrediction {
  std::vector<double> hazard;
  std::vector<double> survival;
  std::vector<double> event_rate;
  std::vector<double> event_prob;
};

/// Full-grid curves derived from a hazard sequence.
inline CurvePrediction curves_from_hazards(const HazardSequence& h) {
  CurvePrediction out;
  out.hazard = h.values;
  out.survival = survival_from_hazards(h).values;
  out.event_rate.resize(out.survival.size());
  for (std::size_t k = 0; k < out.survival.size(); ++k) out.event_rate[k] = 1.0 - out.survival[k];
  out.event_prob = event_probs(h);
  return out;
}

// Losses -----------------------------------------------------------------------

/// A loss value with its gradient d(value)/dh, one entry per hazard.
struct LossTerm {
  double value = 0.0;
  std::vector<double> grad;
};

/// Negative log-likelihood of the event interval l_z:
/// -[log h_{l_z} + sum_{l<l_z} log(1 - h_l)].
inline LossTerm loss_z(const HazardSequence& h, std::size_t l_z) {
  detail::check_hazards(h);
  detail::check_index(l_z, h.size(), "loss_z");
  LossTerm out;
  out.grad.assign(h.size(), 0.0);
  for (std::size_t j = 0; j + 1 < l_z; ++j) {
    const double hj = clamp_hazard(h.values[j]);
    out.value -= std::log1p(-hj);
    if (detail::in_clamp(h.values[j])) out.grad[j] = 1.0 / (1.0 - hj);
  }
  const double hz = clamp_hazard(h.values[l_z - 1]);
  out.value -= std::log(hz);
  if (detail::in_clamp(h.values[l_z - 1])) out.grad[l_z - 1] = -1.0 / hz;
  return out;
}

/// -log W(t_{l_t}) for an uncensored sample, W = 1 - prod_{l<=l_t}(1 - h_l).
inline LossTerm loss_uncensored(const HazardSequence& h, std::size_t l_t) {
  detail::check_hazards(h);
  detail::check_index(l_t, h.size(), "loss_uncensored");
  LossTerm out;
  out.grad.assign(h.size(), 0.0);
  double log_s = 0.0;
  for (std::size_t j = 0; j < l_t; ++j) log_s += std::log1p(-clamp_hazard(h.values[j]));
  const double s = std::exp(log_s);
  const double w = -std::expm1(log_s);
  if (w < kProbFloor) {
    out.value = -std::log(kProbFloor);
    return out;
  }
  // -log1p(-S) keeps full relative precision when W is close to 1.
  out.value = -std::log1p(-s);
  // dW/dh_j = prod_{l != j}(1 - h_l) = S / (1 - h_j)
  for (std::size_t j = 0; j < l_t; ++j) {
    if (!detail::in_clamp(h.values[j])) continue;
    const double hj = clamp_hazard(h.values[j]);
    out.grad[j] = -(s / (1.0 - hj)) / w;
  }
  return out;
}

/// -log S(t_{l_t}) = -sum_{l<=l_t} log(1 - h_l) for a censored sample.
inline LossTerm loss_censored(const HazardSequence& h, std::size_t l_t) {
  detail::check_hazards(h);
  detail::check_index(l_t, h.size(), "loss_censored");
  LossTerm out;
  out.grad.assign(h.size(), 0.0);
  for (std::size_t j = 0; j < l_t; ++j) {
    const double hj = clamp_hazard(h.values[j]);
    out.value -= std::log1p(-hj);
    if (detail::in_clamp(h.values[j])) out.grad[j] = 1.0 / (1.0 - hj);
  }
  return out;
}

// Batch loss -------------------------------------------------------------------

/// full = all three terms; unc_only drops L_censored; cen_only drops L_uncensored.
enum class Ablation { full, unc_only, cen_only };

enum class Reduction { mean, sum };

inline const char* to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::unc_only: return "unc_only";
    case Ablation::cen_only: return "cen_only";
  }
  return "?";
}

inline Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::full;
  if (s == "unc_only") return Ablation::unc_only;
  if (s == "cen_only") return Ablation::cen_only;
  throw std::invalid_argument("unknown ablation '" + s + "' (expected full|unc_only|cen_only)");
}

struct LossConfig {
  double alpha = 0.25;
  Ablation ablation = Ablation::full;
  Reduction reduction = Reduction::mean;
};

/// Supervision for one sample: l_t = bucketize(t); l_z = bucketize(z) when uncensored.
struct SampleTarget {
  std::size_t l_t = 0;
  std::optional<std::size_t> l_z;

  bool censored() const noexcept { return !l_z.has_value(); }
};

struct LossBreakdown {
  double l_z = 0.0;
  double l_uncensored = 0.0;
  double l_censored = 0.0;
  double l_c = 0.0;
  double total = 0.0;
  double alpha = 0.25;
};

struct BatchLoss {
  LossBreakdown breakdown;
  /// d(total)/dh per sample, same length as that sample's hazards.
  std::vector<std::vector<double>> grads;
};

/// alpha * L_z + (1 - alpha) * (L_uncensored + L_censored) over a batch.
/// Under Reduction::mean every term is divided by the batch size, so L_c stays
/// the mean survival-status cross entropy. Ablated terms are reported as 0.
inline BatchLoss loss_total(const std::vector<HazardSequence>& hazards,
                            const std::vector<SampleTarget>& targets, const LossConfig& cfg) {
  if (hazards.empty()) throw std::invalid_argument("loss_total: empty batch");
  if (hazards.size() != targets.size()) {
    throw std::invalid_argument("loss_total: hazards/targets size mismatch");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
    throw std::invalid_argument("loss_total: alpha must lie in [0,1]");
  }
  const bool use_unc = cfg.ablation != Ablation::cen_only;
  const bool use_cen = cfg.ablation != Ablation::unc_only;
  const double scale =
      cfg.reduction == Reduction::mean ? 1.0 / static_cast<double>(hazards.size()) : 1.0;
  const double wz = cfg.alpha * scale;
  const double wc = (1.0 - cfg.alpha) * scale;

  BatchLoss out;
  out.breakdown.alpha = cfg.alpha;
  out.grads.resize(hazards.size());
  for (std::size_t i = 0; i < hazards.size(); ++i) {
    const auto& h = hazards[i];
    const auto& tgt = targets[i];
    auto& g = out.grads[i];
    g.assign(h.size(), 0.0);
    auto accumulate = [&](const LossTerm& term, double weight) {
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += weight * term.grad[k];
    };
    if (!tgt.censored()) {
      const auto lz = loss_z(h, *tgt.l_z);
      out.breakdown.l_z += lz.value;
      accumulate(lz, wz);
      if (use_unc) {
        const auto lu = loss_uncensored(h, tgt.l_t);
        out.breakdown.l_uncensored += lu.value;
        accumulate(lu, wc);
      }
    } else if (use_cen) {
      const auto lc = loss_censored(h, tgt.l_t);
      out.breakdown.l_censored += lc.value;
      accumulate(lc, wc);
    }
  }
  auto& b = out.breakdown;
  b.l_z *= scale;
  b.l_uncensored *= scale;
  b.l_censored *= scale;
  b.l_c = b.l_uncensored + b.l_censored;
  b.total = cfg.alpha * b.l_z + (1.0 - cfg.alpha) * b.l_c;
  return out;
}

}  // namespace drsa
