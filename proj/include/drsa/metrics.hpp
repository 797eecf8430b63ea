#pragma once

// Evaluation metrics: time-dependent C-index, ANLP, and the two significance
// tests (Mann-Whitney U, Welch t) applied to bootstrap metric vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "drsa/core.hpp"

namespace drsa {

/// Per-sample curves over the full grid, indexed [sample][l - 1].
using CurveMatrix = std::vector<std::vector<double>>;

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// C-index ----------------------------------------------------------------------

struct ConcordanceCounts {
  std::uint64_t concordant = 0;
  std::uint64_t tied = 0;
  std::uint64_t pairs = 0;

  double value() const {
    if (pairs == 0) throw UndefinedMetricError("c_index: no comparable pairs");
    return (static_cast<double>(concordant) + 0.5 * static_cast<double>(tied)) /
           static_cast<double>(pairs);
  }
};

namespace detail {

inline void check_curves(const CurveMatrix& curves, const Dataset& data, const char* what) {
  if (curves.size() != data.size()) {
    throw std::invalid_argument(std::string(what) + ": one prediction per sample required");
  }
  for (const auto& c : curves) {
    if (c.size() != data.grid().num_intervals()) {
      throw std::invalid_argument(std::string(what) + ": prediction must cover the full grid");
    }
  }
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t pos) {
    for (std::size_t k = pos + 1; k < tree_.size(); k += k & (~k + 1)) ++tree_[k];
  }
  /// Number of inserted positions < pos.
  std::uint64_t prefix(std::size_t pos) const {
    std::uint64_t s = 0;
    for (std::size_t k = pos; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

}  // namespace detail

/// Comparable pair (i, j): i uncensored and z_i < relevant_time_j. The pair is
/// concordant when W(z_i | x_i) > W(z_i | x_j), with W read at bucketize(z_i).
/// O(n^2) reference path.
inline ConcordanceCounts concordance_pairwise(const CurveMatrix& event_rate, const Dataset& data) {
  detail::check_curves(event_rate, data, "c_index");
  ConcordanceCounts out;
  const auto n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& si = data[i];
    if (si.censored()) continue;
    const double zi = *si.event_time();
    const std::size_t l = data.grid().bucketize(zi) - 1;
    const double wi = event_rate[i][l];
    for (std::size_t j = 0; j < n; ++j) {
      if (!(zi < data[j].relevant_time())) continue;
      const double wj = event_rate[j][l];
      ++out.pairs;
      if (wi > wj) ++out.concordant;
      else if (wi == wj) ++out.tied;
    }
  }
  return out;
}

/// Same counts as concordance_pairwise in O(L n log n): for each interval a
/// sweep over samples in decreasing relevant time feeds a Fenwick tree keyed by
/// the rank of W at that interval.
inline ConcordanceCounts concordance_sweep(const CurveMatrix& event_rate, const Dataset& data) {
  detail::check_curves(event_rate, data, "c_index");
  const auto n = data.size();
  const auto L = data.grid().num_intervals();
  ConcordanceCounts out;

  std::vector<std::size_t> by_time(n);
  std::iota(by_time.begin(), by_time.end(), 0);
  std::stable_sort(by_time.begin(), by_time.end(), [&](std::size_t a, std::size_t b) {
    return data[a].relevant_time() > data[b].relevant_time();
  });

  std::vector<std::vector<std::size_t>> anchors(L);
  for (std::size_t i = 0; i < n; ++i) {
    if (!data[i].censored()) anchors[data.grid().bucketize(*data[i].event_time()) - 1].push_back(i);
  }

  std::vector<double> ranks;
  for (std::size_t l = 0; l < L; ++l) {
    auto& group = anchors[l];
    if (group.empty()) continue;
    std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      return *data[a].event_time() > *data[b].event_time();
    });
    ranks.resize(n);
    for (std::size_t j = 0; j < n; ++j) ranks[j] = event_rate[j][l];
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    auto rank_of = [&](double v) {
      return static_cast<std::size_t>(std::lower_bound(ranks.begin(), ranks.end(), v) -
                                      ranks.begin());
    };
    detail::Fenwick tree(ranks.size());
    std::size_t next = 0;
    std::uint64_t inserted = 0;
    for (std::size_t i : group) {
      const double zi = *data[i].event_time();
      while (next < n && data[by_time[next]].relevant_time() > zi) {
        tree.add(rank_of(event_rate[by_time[next]][l]));
        ++inserted;
        ++next;
      }
      const std::size_t r = rank_of(event_rate[i][l]);
      const std::uint64_t below = tree.prefix(r);
      const std::uint64_t at_or_below = tree.prefix(r + 1);
      out.pairs += inserted;
      out.concordant += below;
      out.tied += at_or_below - below;
    }
  }
  return out;
}

inline double c_index(const CurveMatrix& event_rate, const Dataset& data) {
  return concordance_sweep(event_rate, data).value();
}

inline double c_index_pairwise(const CurveMatrix& event_rate, const Dataset& data) {
  return concordance_pairwise(event_rate, data).value();
}

// ANLP -------------------------------------------------------------------------

/// Mean of -ln p_{bucketize(z)}(x) with p clamped at kProbFloor. Uses the
/// observed event time, falling back to a held-out true event time.
inline double anlp(const CurveMatrix& event_prob, const Dataset& data) {
  detail::check_curves(event_prob, data, "anlp");
  if (data.empty()) throw UndefinedMetricError("anlp: empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto z = data[i].evaluation_event_time();
    if (!z) {
      throw UndefinedMetricError("anlp: sample " + std::to_string(i) + " has no event time");
    }
    sum -= std::log(clamp_prob(event_prob[i][data.grid().bucketize(*z) - 1]));
  }
  return sum / static_cast<double>(data.size());
}

// Significance -----------------------------------------------------------------

enum class SignificanceTest { mann_whitney_u, t_test };

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability of Student's t with df degrees of freedom.
inline double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_two_sided: df must be > 0");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

inline double normal_two_sided(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

/// Mann-Whitney U, normal approximation with tie correction and a 0.5
/// continuity correction. Returns the two-sided p-value.
inline double mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n1 = a.size(), n2 = b.size();
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("mann_whitney_u: need >= 2 per side");
  const std::size_t n = n1 + n2;
  std::vector<std::pair<double, int>> all;
  all.reserve(n);
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  for (std::size_t k = 0; k < n;) {
    std::size_t e = k;
    while (e < n && all[e].first == all[k].first) ++e;
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + e);
    for (std::size_t q = k; q < e; ++q) {
      if (all[q].second == 0) rank_sum_a += avg_rank;
    }
    const double t = static_cast<double>(e - k);
    tie_term += t * t * t - t;
    k = e;
  }
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  const double u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) return 1.0;
  const double dev = std::max(0.0, std::fabs(u - mu) - 0.5);
  return normal_two_sided(dev / std::sqrt(var));
}

/// Welch's unequal-variance t-test, two-sided p-value.
inline double welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n1 = a.size(), n2 = b.size();
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("welch_t_test: need >= 2 per side");
  auto moments = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [m1, v1] = moments(a);
  const auto [m2, v2] = moments(b);
  const double se1 = v1 / static_cast<double>(n1);
  const double se2 = v2 / static_cast<double>(n2);
  const double se = se1 + se2;
  if (!(se > 0.0)) throw UndefinedMetricError("welch_t_test: both samples have zero variance");
  const double t = (m1 - m2) / std::sqrt(se);
  const double df = se * se / (se1 * se1 / static_cast<double>(n1 - 1) +
                               se2 * se2 / static_cast<double>(n2 - 1));
  return student_t_two_sided(t, df);
}

inline double significance(const std::vector<double>& a, const std::vector<double>& b,
                           SignificanceTest kind) {
  return kind == SignificanceTest::mann_whitney_u ? mann_whitney_u(a, b) : welch_t_test(a, b);
}

// Bootstrap --------------------------------------------------------------------

/// Seeded resamples of {0..n-1} with replacement, each of size n.
inline std::vector<std::vector<std::size_t>> bootstrap_indices(std::size_t n,
                                                               std::size_t resamples,
                                                               std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("bootstrap_indices: n must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::vector<std::size_t>> out(resamples, std::vector<std::size_t>(n));
  for (auto& r : out)
    for (auto& k : r) k = pick(rng);
  return out;
}

}  // namespace drsa
