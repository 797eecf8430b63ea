#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "drsa/data.hpp"
#include "drsa/train.hpp"

namespace {

using drsa::TrainConfig;

struct Split {
  drsa::Dataset train, val;
};

Split synthetic(std::size_t n, std::size_t L, std::uint64_t seed, std::size_t d = 6) {
  auto data = drsa::synthesize(drsa::default_synthetic_config(d, L, n, 0.35, seed)).dataset;
  auto [a, b] = drsa::split(data, 0.8, seed + 1);
  return {std::move(a), std::move(b)};
}

TrainConfig small_config() {
  TrainConfig c;
  c.d_emb = 4;
  c.d_hid = 6;
  c.batch_size = 32;
  c.learning_rate = 5e-3;
  c.max_epochs = 4;
  c.seed = 11;
  return c;
}

TEST(Train, ZeroEpochsReturnsInitialisedParameters) {
  const auto s = synthetic(60, 5, 1);
  auto cfg = small_config();
  cfg.max_epochs = 0;
  const auto result = drsa::train(s.train, s.val, cfg);
  EXPECT_TRUE(result.history.empty());
  EXPECT_FALSE(result.best_epoch.has_value());
  std::mt19937_64 rng(cfg.seed);
  EXPECT_TRUE(result.params == drsa::init_params(6, cfg.d_emb, cfg.d_hid, rng()));
}

TEST(Train, IdenticalSeedsGiveIdenticalRuns) {
  const auto s = synthetic(300, 8, 2);
  const auto cfg = small_config();
  const auto a = drsa::train(s.train, s.val, cfg);
  const auto b = drsa::train(s.train, s.val, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    EXPECT_EQ(a.history[k].train.total, b.history[k].train.total);
    EXPECT_EQ(a.history[k].val_c_index, b.history[k].val_c_index);
  }
  EXPECT_TRUE(a.params == b.params);
  auto other = cfg;
  other.seed = 12;
  EXPECT_FALSE(drsa::train(s.train, s.val, other).params == a.params);
}

TEST(Train, LossDecreasesOnSyntheticData) {
  const auto s = synthetic(10000, 20, 3, 20);
  auto cfg = small_config();
  cfg.d_emb = 8;
  cfg.d_hid = 12;
  cfg.batch_size = 128;
  cfg.learning_rate = 1e-3;
  cfg.max_epochs = 4;
  cfg.patience = 10;
  const auto result = drsa::train(s.train, s.val, cfg);
  ASSERT_EQ(result.history.size(), 4u);
  EXPECT_LT(result.history[3].train.total, result.history[0].train.total);
}

TEST(Train, EpochRecordsAreConsistent) {
  const auto s = synthetic(200, 6, 4);
  std::vector<std::size_t> seen;
  const auto result =
      drsa::train(s.train, s.val, small_config(), [&](const auto& r) { seen.push_back(r.epoch); });
  ASSERT_EQ(seen.size(), result.history.size());
  for (std::size_t k = 0; k < seen.size(); ++k) {
    EXPECT_EQ(seen[k], k);
    const auto& b = result.history[k].train;
    EXPECT_DOUBLE_EQ(b.l_c, b.l_uncensored + b.l_censored);
    EXPECT_DOUBLE_EQ(b.total, 0.25 * b.l_z + 0.75 * b.l_c);
  }
}

TEST(Train, ReturnsBestValidationEpoch) {
  const auto s = synthetic(300, 8, 5);
  auto cfg = small_config();
  cfg.max_epochs = 12;
  cfg.patience = 2;
  cfg.learning_rate = 3e-2;
  const auto result = drsa::train(s.train, s.val, cfg);
  ASSERT_TRUE(result.best_epoch.has_value());
  double best = -1.0;
  for (const auto& r : result.history) best = std::max(best, r.val_c_index);
  EXPECT_EQ(result.history[*result.best_epoch].val_c_index, best);
  const auto curves = drsa::predict_curves(result.params, s.val);
  EXPECT_EQ(drsa::c_index(drsa::event_rate_matrix(curves), s.val), best);
  // stopping rule: ran to the end or exactly patience + 1 epochs past the best
  const std::size_t ran = result.history.size();
  EXPECT_TRUE(ran == cfg.max_epochs || ran == *result.best_epoch + cfg.patience + 2) << ran;
}

TEST(Train, AlphaOneGradientIsTheEventTermGradient) {
  const auto s = synthetic(64, 7, 6);
  const auto params = drsa::init_params(6, 4, 5, 9);
  std::vector<std::size_t> batch(40);
  std::iota(batch.begin(), batch.end(), 0);
  const auto full = drsa::batch_gradient(params, s.train, batch, {1.0, drsa::Ablation::full});

  auto expected = drsa::ModelParams::zeros_like(params);
  std::size_t with_event = 0;
  for (auto i : batch) with_event += s.train[i].event_time() ? 1 : 0;
  ASSERT_GT(with_event, 0u);
  for (auto i : batch) {
    const auto& x = s.train[i];
    if (!x.event_time()) continue;
    const auto t = drsa::target_for(x, s.train.grid());
    drsa::ForwardCache cache;
    const auto h = drsa::forward(params, x, t.l_t, s.train.grid(), &cache);
    auto g = drsa::loss_z(h, *t.l_z).grad;
    g.resize(t.l_t, 0.0);
    for (auto& v : g) v /= double(batch.size());
    drsa::backward_accumulate(params, cache, g, expected);
  }
  const auto a = drsa::tensors(full.grads);
  const auto b = drsa::tensors(expected);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t e = 0; e < a[k].data.size(); ++e)
      EXPECT_NEAR(a[k].data[e], b[k].data[e], 1e-14 * (1.0 + std::fabs(b[k].data[e])));
}

TEST(Optimizer, ClippingBoundsTheGlobalNorm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double scale : {1e-3, 0.1, 1.0, 10.0, 1e4}) {
    auto g = drsa::ModelParams::zeros(5, 3, 4);
    for (auto& t : drsa::tensors(g))
      for (double& v : t.data) v = scale * n(rng);
    const auto before = g;
    const double pre = drsa::clip_global_norm(g, 5.0);
    EXPECT_LE(drsa::global_norm(g), 5.0 + 1e-9);
    if (pre <= 5.0) {
      EXPECT_TRUE(g == before);
    } else {
      EXPECT_NEAR(drsa::global_norm(g), 5.0, 1e-9);
    }
  }
}

TEST(Optimizer, AdamZeroGradientStepIsANoOp) {
  auto p = drsa::init_params(5, 3, 4, 1);
  const auto before = p;
  drsa::Adam adam(p, 1e-3);
  adam.step(p, drsa::ModelParams::zeros_like(p));
  EXPECT_TRUE(p == before);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Optimizer, AdamFirstStepMovesEachParameterByTheLearningRate) {
  auto p = drsa::ModelParams::zeros(2, 2, 2);
  auto g = drsa::ModelParams::zeros_like(p);
  g.head(0) = 3.0;
  g.head(1) = -0.01;
  drsa::Adam adam(p, 0.1);
  adam.step(p, g);
  EXPECT_NEAR(p.head(0), -0.1, 1e-8);
  EXPECT_NEAR(p.head(1), 0.1, 1e-5);
  EXPECT_EQ(p.head_bias, 0.0);
}

TEST(Train, RejectsInvalidInput) {
  const auto s = synthetic(50, 5, 8);
  auto cfg = small_config();
  cfg.alpha = 1.5;
  EXPECT_THROW(drsa::train(s.train, s.val, cfg), std::invalid_argument);
  cfg = small_config();
  cfg.batch_size = 0;
  EXPECT_THROW(drsa::train(s.train, s.val, cfg), std::invalid_argument);
  const drsa::Dataset empty({}, 6, s.train.grid());
  EXPECT_THROW(drsa::train(empty, s.val, small_config()), std::invalid_argument);
  EXPECT_THROW(drsa::train(s.train, empty, small_config()), std::invalid_argument);
  const auto other = synthetic(50, 6, 8);
  EXPECT_THROW(drsa::train(s.train, other.val, small_config()), std::invalid_argument);
}

TEST(Train, NonFiniteLossNamesTheBatch) {
  auto s = synthetic(80, 5, 9);
  std::vector<drsa::Sample> samples = s.train.samples();
  const double inf = std::numeric_limits<double>::infinity();
  for (auto& x : samples) {
    drsa::SparseFeatures f;
    for (std::size_t k = 0; k < 6; ++k) f.push_back({k, k % 2 ? inf : -inf});
    x = drsa::Sample(f, x.observed_time(), x.event_time());
  }
  const drsa::Dataset bad(samples, 6, s.train.grid());
  try {
    drsa::train(bad, s.val, small_config());
    FAIL() << "expected a training error";
  } catch (const drsa::TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("batch 0"), std::string::npos) << e.what();
  }
}

}  // namespace
