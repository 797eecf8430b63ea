#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "drsa/survival.hpp"
#include "oracles.hpp"

namespace {

using drsa::HazardSequence;

HazardSequence random_hazards(std::mt19937_64& rng, std::size_t n, double lo = 0.01,
                              double hi = 0.99) {
  std::uniform_real_distribution<double> u(lo, hi);
  HazardSequence h;
  h.values.resize(n);
  for (auto& v : h.values) v = u(rng);
  return h;
}

using oracle::Real;

// Central differences (step 1e-6) of a long-double reference formula.
std::vector<double> numeric_grad(const std::function<Real(const std::vector<Real>&)>& f,
                                 const HazardSequence& h) {
  std::vector<Real> x(h.values.begin(), h.values.end());
  std::vector<double> g(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    g[k] = static_cast<double>(oracle::central_difference<Real>(f, x, k, 1e-6L));
  }
  return g;
}

double rel_err(double a, double b) { return oracle::rel_err(a, b); }

TEST(Survival, ChainRuleProduct) {
  const auto s = drsa::survival_from_hazards({{0.5, 0.5, 0.5}});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0], 0.5, 1e-15);
  EXPECT_NEAR(s[1], 0.25, 1e-15);
  EXPECT_NEAR(s[2], 0.125, 1e-15);
  EXPECT_TRUE(drsa::survival_from_hazards({}).values.empty());
}

TEST(Survival, FloorHazardsKeepSurvivalNearOne) {
  const auto s = drsa::survival_from_hazards({std::vector<double>(10, drsa::kHazardFloor)});
  for (double v : s.values) EXPECT_NEAR(v, 1.0, 1e-5);
  // Exact zeros are clamped to the floor rather than rejected.
  const auto z = drsa::survival_from_hazards({std::vector<double>(3, 0.0)});
  for (double v : z.values) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(Survival, MatchesNaiveSequentialProduct) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto h = random_hazards(rng, 20);
    const auto s = drsa::survival_from_hazards(h);
    double naive = 1.0;
    for (std::size_t k = 0; k < 20; ++k) {
      naive *= 1.0 - h[k];
      EXPECT_LT(rel_err(s[k], naive), 1e-12);
    }
  }
}

TEST(Survival, RejectsInvalidHazards) {
  EXPECT_THROW(drsa::survival_from_hazards({{0.5, 1.5}}), std::invalid_argument);
  EXPECT_THROW(drsa::survival_from_hazards({{NAN}}), std::invalid_argument);
}

TEST(EventRate, ComplementOfSurvival) {
  const auto w = drsa::event_rate_from_hazards({{0.5, 0.5}});
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.75, 1e-15);
  std::mt19937_64 rng(5);
  const auto h = random_hazards(rng, 30);
  const auto s = drsa::survival_from_hazards(h);
  const auto w2 = drsa::event_rate_from_hazards(h);
  for (std::size_t k = 0; k < h.size(); ++k) EXPECT_NEAR(w2[k] + s[k], 1.0, 1e-15);
  EXPECT_NEAR(drsa::event_rate_from_hazards({{1.0 - 1e-9}})[0], 1.0, 1e-6);
}

TEST(EventProb, HandExamples) {
  EXPECT_NEAR(drsa::event_prob_at({{0.2, 0.5}}, 2), 0.4, 1e-15);
  EXPECT_NEAR(drsa::event_prob_at({{0.2, 0.5}}, 1), 0.2, 1e-15);
  EXPECT_THROW(drsa::event_prob_at({{0.2, 0.5}}, 0), std::out_of_range);
  EXPECT_THROW(drsa::event_prob_at({{0.2, 0.5}}, 3), std::out_of_range);
}

TEST(EventProb, PartitionConsistencyAndHazardRecovery) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const auto h = random_hazards(rng, 12);
    const auto s = drsa::survival_from_hazards(h);
    const auto p = drsa::event_probs(h);
    double total = s.values.back();
    for (std::size_t l = 1; l <= 12; ++l) {
      const double pl = drsa::event_prob_at(h, l);
      EXPECT_NEAR(pl, p[l - 1], 1e-15);
      EXPECT_NEAR(pl, s.at(l - 1) - s.at(l), 1e-12);
      if (s.at(l - 1) > 1e-8) EXPECT_NEAR(pl / s.at(l - 1), h[l - 1], 1e-10);
      total += pl;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(LossZ, ValueAndGradient) {
  const HazardSequence h{{0.2, 0.5}};
  const auto lz = drsa::loss_z(h, 2);
  EXPECT_NEAR(lz.value, -std::log(0.4), 1e-12);
  EXPECT_NEAR(lz.value, 0.916291, 1e-6);
  const auto fd = numeric_grad([](const std::vector<Real>& x) { return oracle::naive_loss_z(x, 2); }, h);
  EXPECT_NEAR(lz.grad[0], 1.25, 1e-12);
  EXPECT_NEAR(lz.grad[1], -2.0, 1e-12);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LT(rel_err(lz.grad[k], fd[k]), 1e-6);
  // Confident correct prediction.
  EXPECT_NEAR(drsa::loss_z({{0.999999}}, 1).value, 0.0, 1e-5);
  EXPECT_THROW(drsa::loss_z(h, 3), std::out_of_range);
  EXPECT_THROW(drsa::loss_z(h, 0), std::out_of_range);
}

TEST(LossUncensored, ValueAndGradient) {
  const HazardSequence h{{0.5, 0.5}};
  const auto lu = drsa::loss_uncensored(h, 2);
  EXPECT_NEAR(lu.value, -std::log(0.75), 1e-12);
  EXPECT_NEAR(lu.value, 0.287682, 1e-6);
  const auto fd =
      numeric_grad([](const std::vector<Real>& x) { return oracle::naive_loss_uncensored(x, 2); }, h);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(lu.grad[k], -0.5 / 0.75, 1e-12);
    EXPECT_LT(rel_err(lu.grad[k], fd[k]), 1e-6);
  }
}

TEST(LossUncensored, FloorHazardsStayFinite) {
  const HazardSequence h{std::vector<double>(3, drsa::kHazardFloor)};
  const auto lu = drsa::loss_uncensored(h, 3);
  EXPECT_TRUE(std::isfinite(lu.value));
  EXPECT_GT(lu.value, 10.0);
  for (double g : lu.grad) EXPECT_TRUE(std::isfinite(g));
}

TEST(LossCensored, ValueAndGradient) {
  const HazardSequence h{{0.5, 0.5}};
  const auto lc = drsa::loss_censored(h, 2);
  EXPECT_NEAR(lc.value, -std::log(0.25), 1e-12);
  EXPECT_NEAR(lc.value, 1.386294, 1e-6);
  const auto fd =
      numeric_grad([](const std::vector<Real>& x) { return oracle::naive_loss_censored(x, 2); }, h);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(lc.grad[k], 2.0, 1e-12);
    EXPECT_LT(rel_err(lc.grad[k], fd[k]), 1e-6);
  }
  EXPECT_THROW(drsa::loss_censored(h, 0), std::out_of_range);
}

TEST(LossGradients, MatchFiniteDifferencesOnRandomInputs) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> len(1, 15);
  for (int rep = 0; rep < 100; ++rep) {
    const auto h = random_hazards(rng, len(rng), 0.02, 0.98);
    std::uniform_int_distribution<std::size_t> idx(1, h.size());
    const std::size_t lt = idx(rng);
    std::uniform_int_distribution<std::size_t> zidx(1, lt);
    const std::size_t lz = zidx(rng);
    const auto check = [&](const drsa::LossTerm& term,
                           const std::function<Real(const std::vector<Real>&)>& ref) {
      EXPECT_GE(term.value, 0.0);
      const auto fd = numeric_grad(ref, h);
      for (std::size_t k = 0; k < h.size(); ++k) {
        EXPECT_LT(rel_err(term.grad[k], fd[k]), 1e-5) << term.grad[k] << " vs " << fd[k];
      }
    };
    check(drsa::loss_z(h, lz), [&](const std::vector<Real>& x) { return oracle::naive_loss_z(x, lz); });
    check(drsa::loss_uncensored(h, lt),
          [&](const std::vector<Real>& x) { return oracle::naive_loss_uncensored(x, lt); });
    check(drsa::loss_censored(h, lt),
          [&](const std::vector<Real>& x) { return oracle::naive_loss_censored(x, lt); });
  }
}

TEST(LossTotal, WeightedMixOfTerms) {
  const std::vector<HazardSequence> hs{{{0.2, 0.5}}};
  const std::vector<drsa::SampleTarget> ts{{2, 2}};
  const auto b = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::full, drsa::Reduction::mean});
  EXPECT_NEAR(b.breakdown.l_z, -std::log(0.4), 1e-12);
  EXPECT_NEAR(b.breakdown.l_uncensored, -std::log(1.0 - 0.8 * 0.5), 1e-12);
  EXPECT_NEAR(b.breakdown.total, 0.25 * 0.916291 + 0.75 * -std::log(0.6), 1e-6);
  EXPECT_DOUBLE_EQ(b.breakdown.l_c, b.breakdown.l_uncensored + b.breakdown.l_censored);

  const auto z_only = drsa::loss_total(hs, ts, {1.0, drsa::Ablation::full, drsa::Reduction::mean});
  EXPECT_DOUBLE_EQ(z_only.breakdown.total, z_only.breakdown.l_z);
  EXPECT_THROW(drsa::loss_total({}, {}, {}), std::invalid_argument);
}

// With h=[0.2,0.5] and l_t=2, W = 1 - 0.8*0.5 = 0.6, so L_uncensored = -ln 0.6
// (not -ln 0.75, which is the h=[0.5,0.5] value).
TEST(LossTotal, HandExampleComponents) {
  const std::vector<HazardSequence> hs{{{0.2, 0.5}}};
  const std::vector<drsa::SampleTarget> ts{{2, 2}};
  const auto b = drsa::loss_total(hs, ts, {});
  EXPECT_NEAR(b.breakdown.total, 0.25 * std::log(1 / 0.4) + 0.75 * std::log(1 / 0.6), 1e-12);
}

TEST(LossTotal, AblationRouting) {
  const std::vector<HazardSequence> hs{{{0.3, 0.4}}, {{0.1, 0.2, 0.3}}};
  const std::vector<drsa::SampleTarget> ts{{2, 1}, {3, std::nullopt}};
  const auto unc = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::unc_only, drsa::Reduction::mean});
  EXPECT_EQ(unc.breakdown.l_censored, 0.0);
  EXPECT_GT(unc.breakdown.l_uncensored, 0.0);
  for (double g : unc.grads[1]) EXPECT_EQ(g, 0.0);
  const auto cen = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::cen_only, drsa::Reduction::mean});
  EXPECT_EQ(cen.breakdown.l_uncensored, 0.0);
  EXPECT_GT(cen.breakdown.l_censored, 0.0);
}

TEST(LossTotal, MixedBatchGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  std::bernoulli_distribution censored(0.4);
  std::uniform_int_distribution<std::size_t> len(1, 10);
  std::vector<HazardSequence> hs;
  std::vector<drsa::SampleTarget> ts;
  for (int i = 0; i < 50; ++i) {
    const std::size_t lt = len(rng);
    hs.push_back(random_hazards(rng, lt, 0.05, 0.95));
    drsa::SampleTarget t{lt, std::nullopt};
    if (!censored(rng)) t.l_z = std::uniform_int_distribution<std::size_t>(1, lt)(rng);
    ts.push_back(t);
  }
  std::vector<std::vector<Real>> ref_h;
  std::vector<std::size_t> lt;
  std::vector<std::optional<std::size_t>> lz;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    ref_h.emplace_back(hs[i].values.begin(), hs[i].values.end());
    lt.push_back(ts[i].l_t);
    lz.push_back(ts[i].l_z);
  }
  const auto b = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::full, drsa::Reduction::mean});
  EXPECT_NEAR(b.breakdown.total, static_cast<double>(oracle::naive_total<Real>(ref_h, lt, lz, 0.25L)),
              1e-12);
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const auto f = [&](const std::vector<Real>& x) {
      auto hh = ref_h;
      hh[i] = x;
      return oracle::naive_total<Real>(hh, lt, lz, 0.25L);
    };
    for (std::size_t k = 0; k < hs[i].size(); ++k) {
      const double fd = static_cast<double>(oracle::central_difference<Real>(f, ref_h[i], k, 1e-6L));
      EXPECT_LT(rel_err(b.grads[i][k], fd), 1e-5) << "sample " << i << " entry " << k;
    }
  }
  // Sum reduction scales every gradient by the batch size.
  const auto bs = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::full, drsa::Reduction::sum});
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t k = 0; k < hs[i].size(); ++k)
      EXPECT_NEAR(bs.grads[i][k], 50.0 * b.grads[i][k], 1e-12 * std::max(1.0, std::fabs(bs.grads[i][k])));
}

TEST(LossTotal, ClassificationLossIsSurvivalCrossEntropy) {
  std::mt19937_64 rng(29);
  std::vector<HazardSequence> hs;
  std::vector<drsa::SampleTarget> ts;
  double ce = 0.0;
  for (int i = 0; i < 40; ++i) {
    const std::size_t lt = 1 + static_cast<std::size_t>(i % 9);
    hs.push_back(random_hazards(rng, lt));
    const bool c = i % 3 == 0;
    ts.push_back({lt, c ? std::nullopt : std::optional<std::size_t>(1)});
    double s = 1.0;
    for (double v : hs.back().values) s *= 1.0 - v;
    ce -= c ? std::log(s) : std::log(1.0 - s);
  }
  const auto b = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::full, drsa::Reduction::sum});
  EXPECT_NEAR(b.breakdown.l_c, ce, 1e-10 * std::max(1.0, ce));
  const auto m = drsa::loss_total(hs, ts, {0.25, drsa::Ablation::full, drsa::Reduction::mean});
  EXPECT_NEAR(m.breakdown.l_c, ce / 40.0, 1e-10);
}

}  // namespace
