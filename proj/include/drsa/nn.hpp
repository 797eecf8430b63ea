#pragma once

// Recurrent conditional-hazard network.
//
//   x_l  = [ sum_i v_i * E[i] ; l / L ]                 (static embedding + time channel)
//   a_l  = W_x x_l + W_h r_{l-1} + b                     (gates: input, forget, cell, output)
//   c_l  = f_l * c_{l-1} + i_l * g_l,  r_l = o_l * tanh(c_l)
//   h_l  = logistic(head . r_l + head_bias)              (conditional hazard)
//
// forward() caches every intermediate so backward() can run exact
// backpropagation through time for an arbitrary upstream dL/dh.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "drsa/core.hpp"

namespace drsa {

struct ModelParams {
  std::size_t feature_dim = 0;
  std::size_t d_emb = 0;
  std::size_t d_hid = 0;

  Eigen::MatrixXd embedding;    // feature_dim x d_emb
  Eigen::MatrixXd w_input;      // 4*d_hid x (d_emb + 1)
  Eigen::MatrixXd w_recurrent;  // 4*d_hid x d_hid
  Eigen::VectorXd bias;         // 4*d_hid
  Eigen::VectorXd head;         // d_hid
  double head_bias = 0.0;

  std::size_t d_in() const noexcept { return d_emb + 1; }

  static ModelParams zeros(std::size_t feature_dim, std::size_t d_emb, std::size_t d_hid) {
    if (feature_dim == 0 || d_emb == 0 || d_hid == 0) {
      throw std::invalid_argument("ModelParams: dimensions must be positive");
    }
    ModelParams p;
    p.feature_dim = feature_dim;
    p.d_emb = d_emb;
    p.d_hid = d_hid;
    const auto g = static_cast<Eigen::Index>(4 * d_hid);
    p.embedding = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(feature_dim),
                                        static_cast<Eigen::Index>(d_emb));
    p.w_input = Eigen::MatrixXd::Zero(g, static_cast<Eigen::Index>(d_emb + 1));
    p.w_recurrent = Eigen::MatrixXd::Zero(g, static_cast<Eigen::Index>(d_hid));
    p.bias = Eigen::VectorXd::Zero(g);
    p.head = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_hid));
    p.head_bias = 0.0;
    return p;
  }

  static ModelParams zeros_like(const ModelParams& other) {
    return zeros(other.feature_dim, other.d_emb, other.d_hid);
  }

  void check_shapes() const {
    const auto g = static_cast<Eigen::Index>(4 * d_hid);
    const bool ok = embedding.rows() == static_cast<Eigen::Index>(feature_dim) &&
                    embedding.cols() == static_cast<Eigen::Index>(d_emb) &&
                    w_input.rows() == g && w_input.cols() == static_cast<Eigen::Index>(d_in()) &&
                    w_recurrent.rows() == g &&
                    w_recurrent.cols() == static_cast<Eigen::Index>(d_hid) && bias.size() == g &&
                    head.size() == static_cast<Eigen::Index>(d_hid);
    if (!ok) throw ShapeMismatchError("ModelParams: tensor shapes inconsistent with dims");
  }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.feature_dim == b.feature_dim && a.d_emb == b.d_emb && a.d_hid == b.d_hid &&
           a.embedding == b.embedding && a.w_input == b.w_input &&
           a.w_recurrent == b.w_recurrent && a.bias == b.bias && a.head == b.head &&
           a.head_bias == b.head_bias;
  }
};

/// Named flat view of one parameter tensor (column-major storage).
struct TensorView {
  std::string_view name;
  std::array<std::size_t, 2> shape;
  std::span<double> data;
};

struct ConstTensorView {
  std::string_view name;
  std::array<std::size_t, 2> shape;
  std::span<const double> data;
};

namespace detail {

template <class P, class View>
std::array<View, 6> tensor_views(P& p) {
  auto mat = [](std::string_view name, auto& m) {
    return View{name,
                {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                {m.data(), static_cast<std::size_t>(m.size())}};
  };
  return {mat("embedding", p.embedding),
          mat("w_input", p.w_input),
          mat("w_recurrent", p.w_recurrent),
          mat("bias", p.bias),
          mat("head", p.head),
          View{"head_bias", {1, 1}, {&p.head_bias, 1}}};
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

inline std::array<TensorView, 6> tensors(ModelParams& p) {
  return detail::tensor_views<ModelParams, TensorView>(p);
}

inline std::array<ConstTensorView, 6> tensors(const ModelParams& p) {
  return detail::tensor_views<const ModelParams, ConstTensorView>(p);
}

inline std::size_t num_parameters(const ModelParams& p) {
  std::size_t n = 0;
  for (const auto& t : tensors(p)) n += t.data.size();
  return n;
}

/// Glorot-uniform weights, forget-gate bias 1, other biases 0.
inline ModelParams init_params(std::size_t feature_dim, std::size_t d_emb, std::size_t d_hid,
                               std::uint64_t seed) {
  auto p = ModelParams::zeros(feature_dim, d_emb, d_hid);
  std::mt19937_64 rng(seed);
  auto fill = [&](Eigen::Ref<Eigen::MatrixXd> m, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
  };
  fill(p.embedding, feature_dim, d_emb);
  fill(p.w_input, p.d_in(), 4 * d_hid);
  fill(p.w_recurrent, d_hid, 4 * d_hid);
  fill(p.head, d_hid, 1);
  p.bias.segment(static_cast<Eigen::Index>(d_hid), static_cast<Eigen::Index>(d_hid)).setOnes();
  return p;
}

/// Static part of the input: sum over (i, v) of v * E[i].
inline Eigen::VectorXd embed_features(const ModelParams& params, const SparseFeatures& x) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.d_emb));
  for (const auto& [i, v] : x) {
    if (i >= params.feature_dim) {
      throw std::out_of_range("embed: feature index " + std::to_string(i) +
                              " >= feature_dim " + std::to_string(params.feature_dim));
    }
    e.noalias() += v * params.embedding.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return e;
}

/// Full per-step input vector [embedding ; l / L].
inline Eigen::VectorXd embed_input(const ModelParams& params, const SparseFeatures& x,
                                   std::size_t l, const TimeGrid& grid) {
  if (l < 1 || l > grid.num_intervals()) {
    throw std::out_of_range("embed_input: step index outside [1, L]");
  }
  Eigen::VectorXd in(static_cast<Eigen::Index>(params.d_in()));
  in.head(static_cast<Eigen::Index>(params.d_emb)) = embed_features(params, x);
  in(static_cast<Eigen::Index>(params.d_emb)) =
      static_cast<double>(l) / static_cast<double>(grid.num_intervals());
  return in;
}

struct ForwardCache {
  SparseFeatures features;
  std::size_t num_intervals = 0;
  Eigen::VectorXd embedding;     // static input part, d_emb
  std::vector<double> time_in;   // l / L per step
  Eigen::MatrixXd gates;         // 4H x steps, post-activation (i, f, g, o)
  Eigen::MatrixXd cell;          // H x (steps + 1); column 0 is c_0 = 0
  Eigen::MatrixXd cell_tanh;     // H x steps
  Eigen::MatrixXd hidden;        // H x (steps + 1); column 0 is r_0 = 0
  std::vector<double> head_pre;  // per step
  std::vector<double> hazard_raw;

  std::size_t steps() const noexcept { return head_pre.size(); }
};

namespace detail {

inline void diagnose_non_finite(const ModelParams& params) {
  std::ostringstream msg;
  msg << "forward: non-finite hazard produced";
  for (const auto& t : tensors(params)) {
    std::size_t bad = 0;
    for (double v : t.data) bad += std::isfinite(v) ? 0 : 1;
    if (bad) msg << "; tensor '" << t.name << "' has " << bad << " non-finite entries";
  }
  throw Error(msg.str());
}

}  // namespace detail

/// Unrolls the recurrence for l = 1..l_max from zero state.
/// Returned hazards are clamped to [kHazardFloor, kHazardCeil].
inline HazardSequence forward(const ModelParams& params, const SparseFeatures& x,
                              std::size_t l_max, const TimeGrid& grid, ForwardCache* cache) {
  if (l_max < 1 || l_max > grid.num_intervals()) {
    throw std::out_of_range("forward: l_max outside [1, L]");
  }
  const auto H = static_cast<Eigen::Index>(params.d_hid);
  const auto E = static_cast<Eigen::Index>(params.d_emb);
  const auto steps = static_cast<Eigen::Index>(l_max);
  const double L = static_cast<double>(grid.num_intervals());

  Eigen::VectorXd emb = embed_features(params, x);
  // Step-invariant pre-activation: W_x[:, :E] * emb + b.
  Eigen::VectorXd base = params.bias;
  base.noalias() += params.w_input.leftCols(E) * emb;
  const auto time_col = params.w_input.col(E);

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.features = x;
  c.num_intervals = grid.num_intervals();
  c.gates.resize(4 * H, steps);
  c.cell.resize(H, steps + 1);
  c.cell_tanh.resize(H, steps);
  c.hidden.resize(H, steps + 1);
  c.cell.col(0).setZero();
  c.hidden.col(0).setZero();
  c.time_in.resize(l_max);
  c.head_pre.resize(l_max);
  c.hazard_raw.resize(l_max);

  HazardSequence out;
  out.values.resize(l_max);
  Eigen::VectorXd a(4 * H);
  for (Eigen::Index s = 0; s < steps; ++s) {
    const double tau = static_cast<double>(s + 1) / L;
    a = base + tau * time_col;
    a.noalias() += params.w_recurrent * c.hidden.col(s);
    auto gate = c.gates.col(s);
    for (Eigen::Index k = 0; k < H; ++k) {
      gate(k) = detail::logistic(a(k));
      gate(H + k) = detail::logistic(a(H + k));
      gate(2 * H + k) = std::tanh(a(2 * H + k));
      gate(3 * H + k) = detail::logistic(a(3 * H + k));
    }
    c.cell.col(s + 1) = gate.segment(H, H).cwiseProduct(c.cell.col(s)) +
                        gate.segment(0, H).cwiseProduct(gate.segment(2 * H, H));
    c.cell_tanh.col(s) = c.cell.col(s + 1).array().tanh();
    c.hidden.col(s + 1) = gate.segment(3 * H, H).cwiseProduct(c.cell_tanh.col(s));
    const double zpre = params.head.dot(c.hidden.col(s + 1)) + params.head_bias;
    const double h = detail::logistic(zpre);
    c.time_in[static_cast<std::size_t>(s)] = tau;
    c.head_pre[static_cast<std::size_t>(s)] = zpre;
    c.hazard_raw[static_cast<std::size_t>(s)] = h;
    if (!std::isfinite(h)) detail::diagnose_non_finite(params);
    out.values[static_cast<std::size_t>(s)] = clamp_hazard(h);
  }
  c.embedding = std::move(emb);
  return out;
}

inline HazardSequence forward(const ModelParams& params, const Sample& sample,
                              std::size_t l_max, const TimeGrid& grid,
                              ForwardCache* cache = nullptr) {
  return forward(params, sample.features(), l_max, grid, cache);
}

/// Adds the parameter gradients of a loss with upstream dL/dh (grad_h) into grads.
inline void backward_accumulate(const ModelParams& params, const ForwardCache& cache,
                                std::span<const double> grad_h, ModelParams& grads) {
  const std::size_t n = cache.steps();
  if (grad_h.size() != n) {
    throw ShapeMismatchError("backward: grad_h has " + std::to_string(grad_h.size()) +
                             " entries, cache has " + std::to_string(n) + " steps");
  }
  if (grads.feature_dim != params.feature_dim || grads.d_emb != params.d_emb ||
      grads.d_hid != params.d_hid) {
    throw ShapeMismatchError("backward: gradient buffer dims differ from params");
  }
  const auto H = static_cast<Eigen::Index>(params.d_hid);
  const auto E = static_cast<Eigen::Index>(params.d_emb);

  Eigen::VectorXd dr_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd demb = Eigen::VectorXd::Zero(E);
  Eigen::VectorXd da(4 * H);
  Eigen::VectorXd dr(H);
  Eigen::VectorXd dc(H);
  Eigen::VectorXd x(E + 1);
  x.head(E) = cache.embedding;

  for (std::size_t s = n; s-- > 0;) {
    const auto si = static_cast<Eigen::Index>(s);
    const double h = cache.hazard_raw[s];
    // The output clamp has zero derivative where it binds.
    const double dclamp = (h >= kHazardFloor && h <= kHazardCeil) ? 1.0 : 0.0;
    const double dz = grad_h[s] * dclamp * h * (1.0 - h);

    const auto r = cache.hidden.col(si + 1);
    grads.head.noalias() += dz * r;
    grads.head_bias += dz;
    dr = dz * params.head + dr_next;

    const auto gate = cache.gates.col(si);
    const auto ig = gate.segment(0, H);
    const auto fg = gate.segment(H, H);
    const auto gg = gate.segment(2 * H, H);
    const auto og = gate.segment(3 * H, H);
    const auto tc = cache.cell_tanh.col(si);
    const auto c_prev = cache.cell.col(si);

    dc = dc_next.array() + dr.array() * og.array() * (1.0 - tc.array().square());
    da.segment(0, H) = dc.array() * gg.array() * ig.array() * (1.0 - ig.array());
    da.segment(H, H) = dc.array() * c_prev.array() * fg.array() * (1.0 - fg.array());
    da.segment(2 * H, H) = dc.array() * ig.array() * (1.0 - gg.array().square());
    da.segment(3 * H, H) = dr.array() * tc.array() * og.array() * (1.0 - og.array());
    dc_next = dc.cwiseProduct(fg);

    x(E) = cache.time_in[s];
    grads.w_input.noalias() += da * x.transpose();
    grads.w_recurrent.noalias() += da * cache.hidden.col(si).transpose();
    grads.bias += da;
    demb.noalias() += params.w_input.leftCols(E).transpose() * da;
    dr_next.noalias() = params.w_recurrent.transpose() * da;
  }
  for (const auto& [i, v] : cache.features) {
    grads.embedding.row(static_cast<Eigen::Index>(i)) += v * demb.transpose();
  }
}

inline ModelParams backward(const ModelParams& params, const ForwardCache& cache,
                            std::span<const double> grad_h) {
  auto grads = ModelParams::zeros_like(params);
  backward_accumulate(params, cache, grad_h, grads);
  return grads;
}

/// Hazards over the full grid for a feature vector.
inline HazardSequence predict_hazards(const ModelParams& params, const SparseFeatures& x,
                                      const TimeGrid& grid) {
  return forward(params, x, grid.num_intervals(), grid, nullptr);
}

}  // namespace drsa
