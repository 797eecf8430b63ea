#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace drsa {

// Error hierarchy --------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTimeError : public Error {
 public:
  using Error::Error;
};

class OutOfGridError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// Natural-log clamps shared by the probability algebra and the metrics.
inline constexpr double kHazardFloor = 1e-7;
inline constexpr double kHazardCeil = 1.0 - 1e-7;
inline constexpr double kProbFloor = 1e-12;

inline double clamp_hazard(double h) {
  return h < kHazardFloor ? kHazardFloor : (h > kHazardCeil ? kHazardCeil : h);
}

inline double clamp_prob(double p) { return p < kProbFloor ? kProbFloor : p; }

// TimeGrid ---------------------------------------------------------------------

/// Uniform discrete time grid with right-closed intervals
/// V_l = ((l-1)*interval_size, l*interval_size] for l = 1..num_intervals.
class TimeGrid {
 public:
  TimeGrid(double interval_size, std::size_t num_intervals)
      : interval_size_(interval_size), num_intervals_(num_intervals) {
    if (!(interval_size > 0.0) || !std::isfinite(interval_size)) {
      throw std::invalid_argument("TimeGrid: interval_size must be positive and finite");
    }
    if (num_intervals == 0) {
      throw std::invalid_argument("TimeGrid: num_intervals must be >= 1");
    }
  }

  double interval_size() const noexcept { return interval_size_; }
  std::size_t num_intervals() const noexcept { return num_intervals_; }

  /// Boundary t_l, l in [0, L].
  double boundary(std::size_t l) const noexcept {
    return static_cast<double>(l) * interval_size_;
  }
  double horizon() const noexcept { return boundary(num_intervals_); }

  /// 1-based index of the interval containing t.
  std::size_t bucketize(double t) const {
    if (!(t > 0.0)) {
      throw InvalidTimeError("bucketize: time must be > 0, got " + std::to_string(t));
    }
    if (t > horizon()) {
      throw OutOfGridError("bucketize: time " + std::to_string(t) +
                           " exceeds grid horizon " + std::to_string(horizon()));
    }
    auto l = static_cast<std::size_t>(std::ceil(t / interval_size_));
    // ceil(t/s) can land one off when t/s is not exactly representable.
    if (l > 1 && t <= boundary(l - 1)) --l;
    if (l < num_intervals_ && t > boundary(l)) ++l;
    return l == 0 ? 1 : l;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double interval_size_;
  std::size_t num_intervals_;
};

inline std::size_t bucketize(double t, const TimeGrid& grid) { return grid.bucketize(t); }

// Sample / Dataset -------------------------------------------------------------

struct FeatureEntry {
  std::size_t index;
  double value;
  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

using SparseFeatures = std::vector<FeatureEntry>;

/// One right-censored observation. censored() is true iff event_time is absent.
/// true_event_time optionally carries a held-out ground-truth event time (for
/// evaluation on censored test rows); training never reads it.
class Sample {
 public:
  Sample(SparseFeatures features, double observed_time, std::optional<double> event_time,
         std::optional<double> true_event_time = std::nullopt)
      : features_(std::move(features)),
        observed_time_(observed_time),
        event_time_(event_time),
        true_event_time_(true_event_time) {
    if (!(observed_time_ > 0.0) || !std::isfinite(observed_time_)) {
      throw InvalidTimeError("Sample: observed time must be positive and finite");
    }
    if (event_time_) {
      if (!(*event_time_ > 0.0)) throw InvalidTimeError("Sample: event time must be > 0");
      if (*event_time_ > observed_time_) {
        throw DataError("Sample: event time exceeds observed time (z > t)");
      }
      if (true_event_time_ && *true_event_time_ != *event_time_) {
        throw DataError("Sample: true event time disagrees with observed event time");
      }
    }
    if (true_event_time_ && !(*true_event_time_ > 0.0)) {
      throw InvalidTimeError("Sample: true event time must be > 0");
    }
    for (std::size_t k = 1; k < features_.size(); ++k) {
      if (features_[k].index <= features_[k - 1].index) {
        throw DataError("Sample: feature indices must be strictly increasing");
      }
    }
  }

  const SparseFeatures& features() const noexcept { return features_; }
  double observed_time() const noexcept { return observed_time_; }
  const std::optional<double>& event_time() const noexcept { return event_time_; }
  const std::optional<double>& true_event_time() const noexcept { return true_event_time_; }

  /// Censoring indicator c: 0 = event observed, 1 = censored.
  int censor_status() const noexcept { return event_time_ ? 0 : 1; }
  bool censored() const noexcept { return !event_time_.has_value(); }

  /// z for uncensored samples, t for censored ones.
  double relevant_time() const noexcept { return event_time_ ? *event_time_ : observed_time_; }

  /// Event time usable for evaluation: the observed z, else the held-out truth.
  std::optional<double> evaluation_event_time() const noexcept {
    return event_time_ ? event_time_ : true_event_time_;
  }

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  SparseFeatures features_;
  double observed_time_;
  std::optional<double> event_time_;
  std::optional<double> true_event_time_;
};

class Dataset {
 public:
  Dataset(std::vector<Sample> samples, std::size_t feature_dim, TimeGrid grid)
      : samples_(std::move(samples)), feature_dim_(feature_dim), grid_(grid) {
    if (feature_dim_ == 0) throw std::invalid_argument("Dataset: feature_dim must be >= 1");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (s.observed_time() > grid_.horizon()) {
        throw OutOfGridError("Dataset: sample " + std::to_string(i) +
                             " has observed time beyond the grid horizon");
      }
      if (s.true_event_time() && *s.true_event_time() > grid_.horizon()) {
        throw OutOfGridError("Dataset: sample " + std::to_string(i) +
                             " has true event time beyond the grid horizon");
      }
      if (!s.features().empty() && s.features().back().index >= feature_dim_) {
        throw DataError("Dataset: sample " + std::to_string(i) +
                        " has a feature index >= feature_dim");
      }
    }
  }

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  const TimeGrid& grid() const noexcept { return grid_; }

  double censor_rate() const noexcept {
    if (samples_.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& s : samples_) n += s.censored() ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(samples_.size());
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sample> samples_;
  std::size_t feature_dim_;
  TimeGrid grid_;
};

// Curves -----------------------------------------------------------------------

/// Conditional hazards h_1..h_l.
struct HazardSequence {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  double operator[](std::size_t k) const { return values[k]; }
};

/// S(t_1)..S(t_l); S(t_0) = 1 is implied.
struct SurvivalCurve {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  /// S(t_l) with l 0-based-inclusive of t_0: at(0) == 1.
  double at(std::size_t l) const { return l == 0 ? 1.0 : values.at(l - 1); }
};

}  // namespace drsa
