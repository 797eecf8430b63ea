#pragma once

// Mini-batch maximum-likelihood training of the recurrent hazard model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "drsa/core.hpp"
#include "drsa/metrics.hpp"
#include "drsa/nn.hpp"
#include "drsa/survival.hpp"

namespace drsa {

class TrainingError : public Error {
 public:
  using Error::Error;
};

struct TrainConfig {
  double alpha = 0.25;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
  Ablation ablation = Ablation::full;
  Reduction reduction = Reduction::mean;
  std::size_t d_emb = 32;
  std::size_t d_hid = 64;

  void validate() const {
    auto fail = [](const char* m) { throw std::invalid_argument(std::string("TrainConfig: ") + m); };
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must be in [0,1]");
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("betas in [0,1)");
    if (!(adam_eps > 0.0)) fail("adam eps must be positive");
    if (batch_size == 0) fail("batch_size must be positive");
    if (!(grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
    if (d_emb == 0 || d_hid == 0) fail("model dims must be positive");
  }

  LossConfig loss() const { return {alpha, ablation, reduction}; }
};

struct EpochRecord {
  std::size_t epoch = 0;
  LossBreakdown train;  // sample-weighted mean over the epoch's batches
  double val_c_index = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
  std::optional<std::size_t> best_epoch;
};

// Optimizer pieces -------------------------------------------------------------

inline double global_norm(const ModelParams& grads) {
  double s = 0.0;
  for (const auto& t : tensors(grads))
    for (double v : t.data) s += v * v;
  return std::sqrt(s);
}

/// Rescales grads so the global L2 norm is at most max_norm; returns the pre-clip norm.
inline double clip_global_norm(ModelParams& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& t : tensors(grads))
      for (double& v : t.data) v *= scale;
  }
  return norm;
}

class Adam {
 public:
  Adam(const ModelParams& shape, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : m_(ModelParams::zeros_like(shape)),
        v_(ModelParams::zeros_like(shape)),
        lr_(lr),
        beta1_(beta1),
        beta2_(beta2),
        eps_(eps) {}

  void step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto p = tensors(params);
    auto g = tensors(grads);
    auto m = tensors(m_);
    auto v = tensors(v_);
    for (std::size_t k = 0; k < p.size(); ++k) {
      for (std::size_t e = 0; e < p[k].data.size(); ++e) {
        const double gi = g[k].data[e];
        double& mi = m[k].data[e];
        double& vi = v[k].data[e];
        mi = beta1_ * mi + (1.0 - beta1_) * gi;
        vi = beta2_ * vi + (1.0 - beta2_) * gi * gi;
        p[k].data[e] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + eps_);
      }
    }
  }

  std::uint64_t steps() const noexcept { return t_; }

 private:
  ModelParams m_, v_;
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
};

// Per-sample plumbing ----------------------------------------------------------

inline SampleTarget target_for(const Sample& s, const TimeGrid& grid) {
  SampleTarget t;
  t.l_t = grid.bucketize(s.observed_time());
  if (s.event_time()) t.l_z = grid.bucketize(*s.event_time());
  return t;
}

/// Loss breakdown and parameter gradient of one batch. Each sample is unrolled
/// only to its own l_t.
struct BatchGradient {
  LossBreakdown loss;
  ModelParams grads;
};

inline BatchGradient batch_gradient(const ModelParams& params, const Dataset& data,
                                    std::span<const std::size_t> batch, const LossConfig& cfg) {
  std::vector<ForwardCache> caches(batch.size());
  std::vector<HazardSequence> hazards(batch.size());
  std::vector<SampleTarget> targets(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& s = data[batch[k]];
    targets[k] = target_for(s, data.grid());
    hazards[k] = forward(params, s, targets[k].l_t, data.grid(), &caches[k]);
  }
  auto loss = loss_total(hazards, targets, cfg);
  BatchGradient out{loss.breakdown, ModelParams::zeros_like(params)};
  for (std::size_t k = 0; k < batch.size(); ++k) {
    backward_accumulate(params, caches[k], loss.grads[k], out.grads);
  }
  return out;
}

/// Full-grid curves for every sample.
inline std::vector<CurvePrediction> predict_curves(const ModelParams& params, const Dataset& data) {
  std::vector<CurvePrediction> out;
  out.reserve(data.size());
  for (const auto& s : data.samples()) {
    out.push_back(curves_from_hazards(predict_hazards(params, s.features(), data.grid())));
  }
  return out;
}

inline CurveMatrix event_rate_matrix(const std::vector<CurvePrediction>& curves) {
  CurveMatrix m;
  m.reserve(curves.size());
  for (const auto& c : curves) m.push_back(c.event_rate);
  return m;
}

inline CurveMatrix event_prob_matrix(const std::vector<CurvePrediction>& curves) {
  CurveMatrix m;
  m.reserve(curves.size());
  for (const auto& c : curves) m.push_back(c.event_prob);
  return m;
}

// Training loop ----------------------------------------------------------------

/// Seeded per-epoch shuffle, batch forward/backward, global-norm clipping and
/// Adam. Early stopping watches validation C-index; the parameters of the best
/// validation epoch are returned.
inline TrainResult train(const Dataset& train_set, const Dataset& validation_set,
                         const TrainConfig& config,
                         const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (validation_set.empty()) throw std::invalid_argument("train: empty validation set");
  if (train_set.feature_dim() != validation_set.feature_dim() ||
      !(train_set.grid() == validation_set.grid())) {
    throw std::invalid_argument("train: training and validation sets disagree on features/grid");
  }

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  result.params = init_params(train_set.feature_dim(), config.d_emb, config.d_hid, rng());
  if (config.max_epochs == 0) return result;

  ModelParams params = result.params;
  Adam adam(params, config.learning_rate, config.beta1, config.beta2, config.adam_eps);
  const LossConfig loss_cfg = config.loss();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train.alpha = config.alpha;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      const auto where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_index);
      std::optional<BatchGradient> computed;
      try {
        computed = batch_gradient(params, train_set, batch, loss_cfg);
      } catch (const Error& e) {
        throw TrainingError("train: " + where + ": " + e.what());
      }
      auto& bg = *computed;
      if (!std::isfinite(bg.loss.total)) throw TrainingError("train: non-finite loss at " + where);
      clip_global_norm(bg.grads, config.grad_clip_norm);
      adam.step(params, bg.grads);
      // Batch terms are means under Reduction::mean; weight by batch length.
      const double w = config.reduction == Reduction::mean ? static_cast<double>(len) : 1.0;
      rec.train.l_z += w * bg.loss.l_z;
      rec.train.l_uncensored += w * bg.loss.l_uncensored;
      rec.train.l_censored += w * bg.loss.l_censored;
    }
    const double norm =
        config.reduction == Reduction::mean ? 1.0 / static_cast<double>(order.size()) : 1.0;
    rec.train.l_z *= norm;
    rec.train.l_uncensored *= norm;
    rec.train.l_censored *= norm;
    rec.train.l_c = rec.train.l_uncensored + rec.train.l_censored;
    rec.train.total = config.alpha * rec.train.l_z + (1.0 - config.alpha) * rec.train.l_c;

    rec.val_c_index = c_index(event_rate_matrix(predict_curves(params, validation_set)),
                              validation_set);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_c_index > best) {
      best = rec.val_c_index;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best > config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace drsa
