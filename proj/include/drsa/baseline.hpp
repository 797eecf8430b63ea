#pragma once

// Population-level reference estimators: the Kaplan-Meier product-limit curve
// and a single constant hazard shared by every interval and sample.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "drsa/core.hpp"
#include "drsa/survival.hpp"

namespace drsa {

struct KMCurve {
  TimeGrid grid;
  std::vector<std::size_t> at_risk;  // n_l
  std::vector<std::size_t> events;   // d_l
  std::vector<double> survival;      // S_KM(t_l), l = 1..L
  std::vector<double> event_prob;    // S_KM(t_{l-1}) - S_KM(t_l)
};

/// Product-limit estimate on the dataset's grid. A sample is at risk in
/// interval l while bucketize(relevant_time) >= l, so a sample censored in
/// interval l still counts toward n_l.
inline KMCurve km_fit(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("km_fit: empty dataset");
  const auto& grid = data.grid();
  const std::size_t L = grid.num_intervals();
  // exits[l] = number of samples whose relevant interval is l.
  std::vector<std::size_t> exits(L + 2, 0);
  KMCurve km{grid, std::vector<std::size_t>(L, 0), std::vector<std::size_t>(L, 0), {}, {}};
  for (const auto& s : data.samples()) {
    const std::size_t l = grid.bucketize(s.relevant_time());
    ++exits[l];
    if (!s.censored()) ++km.events[l - 1];
  }
  std::size_t at_risk = data.size();
  double surv = 1.0;
  km.survival.resize(L);
  km.event_prob.resize(L);
  for (std::size_t l = 1; l <= L; ++l) {
    km.at_risk[l - 1] = at_risk;
    const double prev = surv;
    if (at_risk > 0) {
      surv *= static_cast<double>(at_risk - km.events[l - 1]) / static_cast<double>(at_risk);
    }
    km.survival[l - 1] = surv;
    km.event_prob[l - 1] = prev - surv;
    at_risk -= exits[l];
  }
  return km;
}

/// The KM prediction ignores features: every sample gets the population curve.
inline CurvePrediction km_predict(const KMCurve& km, const Sample& /*sample*/) {
  CurvePrediction out;
  const std::size_t L = km.survival.size();
  out.survival = km.survival;
  out.event_prob = km.event_prob;
  out.event_rate.resize(L);
  out.hazard.resize(L);
  double prev = 1.0;
  for (std::size_t l = 0; l < L; ++l) {
    out.event_rate[l] = 1.0 - km.survival[l];
    out.hazard[l] = prev > 0.0 ? km.event_prob[l] / prev : 1.0;
    prev = km.survival[l];
  }
  return out;
}

/// Single hazard rate h shared by all intervals and samples.
struct ConstantHazardModel {
  double hazard = 0.5;
  std::size_t num_intervals = 1;

  CurvePrediction predict() const {
    return curves_from_hazards(HazardSequence{std::vector<double>(num_intervals, hazard)});
  }
};

/// Censored maximum-likelihood constant hazard: events / intervals at risk.
inline ConstantHazardModel constant_hazard_mle(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("constant_hazard_mle: empty dataset");
  double events = 0.0;
  double exposure = 0.0;
  for (const auto& s : data.samples()) {
    if (s.censored()) {
      exposure += static_cast<double>(data.grid().bucketize(s.observed_time()));
    } else {
      exposure += static_cast<double>(data.grid().bucketize(*s.event_time()));
      events += 1.0;
    }
  }
  return {clamp_hazard(events / exposure), data.grid().num_intervals()};
}

/// Constant hazard minimising ANLP on known event intervals: the geometric MLE
/// n / sum(l_z). This is the best any constant-hazard model can score there.
inline ConstantHazardModel constant_hazard_best_anlp(const std::vector<std::size_t>& event_intervals,
                                                     std::size_t num_intervals) {
  if (event_intervals.empty()) {
    throw std::invalid_argument("constant_hazard_best_anlp: no event intervals");
  }
  double total = 0.0;
  for (auto l : event_intervals) total += static_cast<double>(l);
  return {clamp_hazard(static_cast<double>(event_intervals.size()) / total), num_intervals};
}

}  // namespace drsa
