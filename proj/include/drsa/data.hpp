#pragma once

// Data ingestion and generation.
//
// CSV files are comma separated with a header row. A schema file assigns
// column roles with `key = value` lines:
//
//   time        = t            # observed time column (required)
//   event       = z            # event time column, empty cell = censored
//   true_event  = z_true       # optional held-out event time for evaluation
//   categorical = sex, region  # one-hot encoded
//   numerical   = age          # passed through as-is
//   id          = id           # optional row identifier
//
// Feature indices follow CSV header order. A numerical column takes one index;
// a categorical column takes a block whose first slot is the out-of-vocabulary
// value, followed by the training values in first-occurrence order.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "drsa/core.hpp"

namespace drsa {

// Text helpers -----------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Schema -----------------------------------------------------------------------

struct Schema {
  std::string time_column;
  std::optional<std::string> event_column;
  std::optional<std::string> true_event_column;
  std::optional<std::string> id_column;
  std::vector<std::string> categorical;
  std::vector<std::string> numerical;

  static Schema parse(std::istream& in) {
    Schema s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view v = line;
      if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
      v = detail::trim(v);
      if (v.empty()) continue;
      const auto eq = v.find('=');
      if (eq == std::string_view::npos) {
        throw DataError("schema line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key(detail::trim(v.substr(0, eq)));
      const std::string val(detail::trim(v.substr(eq + 1)));
      auto list = [&] {
        std::vector<std::string> out;
        if (val.empty()) return out;
        for (auto& f : detail::split_fields(val)) {
          if (!f.empty()) out.push_back(std::move(f));
        }
        return out;
      };
      if (key == "time") s.time_column = val;
      else if (key == "event") s.event_column = val;
      else if (key == "true_event") s.true_event_column = val;
      else if (key == "id") s.id_column = val;
      else if (key == "categorical") s.categorical = list();
      else if (key == "numerical") s.numerical = list();
      else throw DataError("schema line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (s.time_column.empty()) throw DataError("schema: missing required key 'time'");
    return s;
  }

  static Schema load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file '" + path + "'");
    return parse(in);
  }

  void write(std::ostream& out) const {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k];
      return s;
    };
    if (id_column) out << "id = " << *id_column << "\n";
    out << "time = " << time_column << "\n";
    if (event_column) out << "event = " << *event_column << "\n";
    if (true_event_column) out << "true_event = " << *true_event_column << "\n";
    if (!categorical.empty()) out << "categorical = " << join(categorical) << "\n";
    if (!numerical.empty()) out << "numerical = " << join(numerical) << "\n";
  }
};

// Feature vocabulary -----------------------------------------------------------

class FeatureEncoder {
 public:
  struct Column {
    std::string name;
    bool categorical = false;
    std::size_t offset = 0;            // first feature index of this column
    std::vector<std::string> values;   // categorical only; index offset+1+k
  };

  FeatureEncoder() = default;
  FeatureEncoder(std::vector<Column> columns, std::size_t dim)
      : columns_(std::move(columns)), dim_(dim) {}

  /// Builds the vocabulary from header order and the given (training) rows.
  static FeatureEncoder fit(const Schema& schema, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
    FeatureEncoder enc;
    for (std::size_t k = 0; k < header.size(); ++k) {
      const auto& name = header[k];
      const bool is_cat = std::find(schema.categorical.begin(), schema.categorical.end(), name) !=
                          schema.categorical.end();
      const bool is_num = std::find(schema.numerical.begin(), schema.numerical.end(), name) !=
                          schema.numerical.end();
      if (is_cat && is_num) {
        throw DataError("schema: column '" + name + "' is both categorical and numerical");
      }
      if (!is_cat && !is_num) continue;
      Column col{name, is_cat, enc.dim_, {}};
      if (is_cat) {
        for (const auto& row : rows) {
          const auto& v = row[k];
          if (std::find(col.values.begin(), col.values.end(), v) == col.values.end()) {
            col.values.push_back(v);
          }
        }
        enc.dim_ += 1 + col.values.size();
      } else {
        enc.dim_ += 1;
      }
      enc.columns_.push_back(std::move(col));
    }
    auto require = [&](const std::vector<std::string>& names) {
      for (const auto& n : names) {
        if (std::find(header.begin(), header.end(), n) == header.end()) {
          throw DataError("missing required column '" + n + "'");
        }
      }
    };
    require(schema.categorical);
    require(schema.numerical);
    if (enc.dim_ == 0) throw DataError("schema declares no feature columns");
    return enc;
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }

  /// Encodes one row given the header's name -> position map. Zero numerical
  /// values are omitted from the sparse vector.
  SparseFeatures encode(const std::map<std::string, std::size_t>& position,
                        const std::vector<std::string>& row, std::size_t lineno) const {
    SparseFeatures out;
    for (const auto& col : columns_) {
      const auto it = position.find(col.name);
      if (it == position.end()) throw DataError("missing required column '" + col.name + "'");
      const auto& cell = row[it->second];
      if (col.categorical) {
        const auto v = std::find(col.values.begin(), col.values.end(), cell);
        const std::size_t slot =
            v == col.values.end() ? 0 : 1 + static_cast<std::size_t>(v - col.values.begin());
        out.push_back({col.offset + slot, 1.0});
      } else {
        const auto v = detail::parse_double(cell);
        if (!v) {
          throw DataError("line " + std::to_string(lineno) + ": non-numeric value '" + cell +
                          "' in column '" + col.name + "'");
        }
        if (*v != 0.0) out.push_back({col.offset, *v});
      }
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
      cols.push_back({{"name", c.name},
                      {"kind", c.categorical ? "categorical" : "numerical"},
                      {"offset", c.offset},
                      {"values", c.values}});
    }
    return {{"dim", dim_}, {"columns", cols}};
  }

  static FeatureEncoder from_json(const nlohmann::json& j) {
    FeatureEncoder enc;
    enc.dim_ = j.at("dim").get<std::size_t>();
    for (const auto& c : j.at("columns")) {
      Column col;
      col.name = c.at("name").get<std::string>();
      col.categorical = c.at("kind").get<std::string>() == "categorical";
      col.offset = c.at("offset").get<std::size_t>();
      col.values = c.at("values").get<std::vector<std::string>>();
      enc.columns_.push_back(std::move(col));
    }
    return enc;
  }

  friend bool operator==(const FeatureEncoder& a, const FeatureEncoder& b) {
    return a.to_json() == b.to_json();
  }

 private:
  std::vector<Column> columns_;
  std::size_t dim_ = 0;
};

// CSV loading ------------------------------------------------------------------

/// Grid for loaded data: num_intervals = 0 means ceil(max time / interval_size).
struct GridChoice {
  double interval_size = 1.0;
  std::size_t num_intervals = 0;
};

struct LoadedData {
  Dataset dataset;
  FeatureEncoder encoder;
  std::vector<std::string> ids;
};

/// Parses a CSV stream. With `encoder` the given vocabulary is applied (unseen
/// categories map to the out-of-vocabulary slot), otherwise one is fit here.
inline LoadedData read_csv(std::istream& in, const Schema& schema, const GridChoice& grid_choice,
                           const FeatureEncoder* encoder = nullptr) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) {
      header = detail::split_fields(line);
      break;
    }
  }
  if (header.empty()) throw DataError("CSV is empty (no header row)");
  if (!header.front().empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0) {
    header.front().erase(0, 3);
  }
  std::map<std::string, std::size_t> position;
  for (std::size_t k = 0; k < header.size(); ++k) position.emplace(header[k], k);
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = position.find(name);
    if (it == position.end()) throw DataError("missing required column '" + name + "'");
    return it->second;
  };
  const std::size_t time_col = column(schema.time_column);
  const std::optional<std::size_t> event_col =
      schema.event_column ? std::optional(column(*schema.event_column)) : std::nullopt;
  const std::optional<std::size_t> truth_col =
      schema.true_event_column ? std::optional(column(*schema.true_event_column)) : std::nullopt;
  const std::optional<std::size_t> id_col =
      schema.id_column ? std::optional(column(*schema.id_column)) : std::nullopt;

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> linenos;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
    linenos.push_back(lineno);
  }
  if (rows.empty()) throw DataError("CSV has a header but no data rows");

  FeatureEncoder enc = encoder ? *encoder : FeatureEncoder::fit(schema, header, rows);

  std::vector<Sample> samples;
  std::vector<std::string> ids;
  samples.reserve(rows.size());
  double max_time = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = "line " + std::to_string(linenos[r]);
    const auto t = detail::parse_double(row[time_col]);
    if (!t) throw DataError(where + ": non-numeric observed time '" + row[time_col] + "'");
    std::optional<double> z;
    if (event_col && !detail::trim(row[*event_col]).empty()) {
      z = detail::parse_double(row[*event_col]);
      if (!z) throw DataError(where + ": non-numeric event time '" + row[*event_col] + "'");
      if (*z > *t) throw DataError(where + ": event time exceeds observed time (z > t)");
    }
    std::optional<double> truth;
    if (truth_col && !detail::trim(row[*truth_col]).empty()) {
      truth = detail::parse_double(row[*truth_col]);
      if (!truth) throw DataError(where + ": non-numeric true event time");
    }
    try {
      samples.emplace_back(enc.encode(position, row, linenos[r]), *t, z, truth);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    } catch (const InvalidTimeError& e) {
      throw DataError(where + ": " + e.what());
    }
    max_time = std::max({max_time, *t, truth.value_or(0.0)});
    ids.push_back(id_col ? row[*id_col] : std::to_string(r));
  }
  std::size_t L = grid_choice.num_intervals;
  if (L == 0) {
    L = static_cast<std::size_t>(std::ceil(max_time / grid_choice.interval_size));
    L = std::max<std::size_t>(L, 1);
  }
  const std::size_t dim = enc.dim();
  return {Dataset(std::move(samples), dim, TimeGrid(grid_choice.interval_size, L)), std::move(enc),
          std::move(ids)};
}

inline LoadedData load_csv(const std::string& path, const Schema& schema,
                           const GridChoice& grid_choice = {},
                           const FeatureEncoder* encoder = nullptr) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path + "'");
  return read_csv(in, schema, grid_choice, encoder);
}

// CSV writing ------------------------------------------------------------------

/// Schema matching write_csv's dense layout.
inline Schema dense_schema(std::size_t feature_dim) {
  Schema s;
  s.id_column = "id";
  s.time_column = "t";
  s.event_column = "z";
  s.true_event_column = "z_true";
  for (std::size_t k = 0; k < feature_dim; ++k) s.numerical.push_back("f" + std::to_string(k));
  return s;
}

/// Dense layout: id, f0..f{d-1}, t, z, z_true with round-trip float formatting.
inline void write_csv(const Dataset& data, std::ostream& out) {
  out << "id";
  for (std::size_t k = 0; k < data.feature_dim(); ++k) out << ",f" << k;
  out << ",t,z,z_true\n";
  std::vector<double> dense(data.feature_dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    std::fill(dense.begin(), dense.end(), 0.0);
    for (const auto& [k, v] : s.features()) dense[k] = v;
    out << i;
    for (double v : dense) out << ',' << detail::format_double(v);
    out << ',' << detail::format_double(s.observed_time()) << ',';
    if (s.event_time()) out << detail::format_double(*s.event_time());
    out << ',';
    if (s.true_event_time()) out << detail::format_double(*s.true_event_time());
    out << '\n';
  }
}

inline void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write CSV file '" + path + "'");
  write_csv(data, out);
  if (!out) throw DataError("failed writing CSV file '" + path + "'");
}

// Splitting --------------------------------------------------------------------

/// Seeded shuffle, then the first ceil-ish `ratio` share goes to train. The
/// test size is floor(n * (1 - ratio)), kept within [1, n - 1].
inline std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split: ratio must be in (0,1)");
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("split: need at least 2 samples");
  auto n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) - static_cast<double>(n) * ratio + 1e-9));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Sample> train, test;
  train.reserve(n - n_test);
  test.reserve(n_test);
  for (std::size_t k = 0; k < n; ++k) {
    (k < n - n_test ? train : test).push_back(data[order[k]]);
  }
  return {Dataset(std::move(train), data.feature_dim(), data.grid()),
          Dataset(std::move(test), data.feature_dim(), data.grid())};
}

/// Subset by index (indices may repeat, e.g. bootstrap resamples).
inline Dataset subset(const Dataset& data, const std::vector<std::size_t>& indices) {
  std::vector<Sample> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(data[i]);
  return Dataset(std::move(out), data.feature_dim(), data.grid());
}

// Synthetic generator ----------------------------------------------------------

struct SyntheticConfig {
  std::size_t feature_dim = 20;
  std::size_t num_samples = 1000;
  TimeGrid grid{1.0, 20};
  std::vector<double> weights;  // feature_dim
  std::vector<double> bias;     // one per interval
  double censor_fraction_target = 0.35;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (feature_dim == 0) throw std::invalid_argument("SyntheticConfig: feature_dim must be > 0");
    if (num_samples == 0) throw std::invalid_argument("SyntheticConfig: num_samples must be > 0");
    if (weights.size() != feature_dim) {
      throw std::invalid_argument("SyntheticConfig: weights must have feature_dim entries");
    }
    if (bias.size() != grid.num_intervals()) {
      throw std::invalid_argument("SyntheticConfig: bias must have one entry per interval");
    }
    if (!(censor_fraction_target >= 0.0 && censor_fraction_target < 1.0)) {
      throw std::invalid_argument("SyntheticConfig: censor_fraction_target must be in [0,1)");
    }
  }
};

/// Ground-truth hazards logistic(w . x + b_l), l = 1..L (unclamped).
inline std::vector<double> true_hazards(const std::vector<double>& weights,
                                        const std::vector<double>& bias,
                                        const SparseFeatures& x) {
  double eta = 0.0;
  for (const auto& [k, v] : x) eta += weights.at(k) * v;
  std::vector<double> h(bias.size());
  for (std::size_t l = 0; l < bias.size(); ++l) h[l] = 1.0 / (1.0 + std::exp(-(eta + bias[l])));
  return h;
}

/// Event-interval pmf of the generator: sequential hazards with any mass left
/// after interval L-1 assigned to L.
inline std::vector<double> true_event_probs(const std::vector<double>& hazards) {
  std::vector<double> p(hazards.size());
  double surv = 1.0;
  for (std::size_t l = 0; l < hazards.size(); ++l) {
    p[l] = l + 1 == hazards.size() ? surv : surv * hazards[l];
    surv *= 1.0 - hazards[l];
  }
  return p;
}

/// Ground truth needed to replay or score a synthetic dataset.
struct SyntheticManifest {
  SyntheticConfig config;
  /// Probability that a sample's observation time is drawn uniformly from the
  /// grid; otherwise it is t_L.
  double censor_probability = 1.0;
  /// Expected censoring rate when every observation time is uniform.
  double uniform_censor_rate = 0.0;
  std::size_t warnings = 0;

  nlohmann::json to_json() const {
    return {{"format", "drsa-synthetic-manifest"},
            {"version", 1},
            {"feature_dim", config.feature_dim},
            {"num_samples", config.num_samples},
            {"interval_size", config.grid.interval_size()},
            {"num_intervals", config.grid.num_intervals()},
            {"weights", config.weights},
            {"bias", config.bias},
            {"censor_fraction_target", config.censor_fraction_target},
            {"seed", config.rng_seed},
            {"censor_probability", censor_probability},
            {"uniform_censor_rate", uniform_censor_rate},
            {"warnings", warnings}};
  }

  static SyntheticManifest from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "drsa-synthetic-manifest") {
      throw DataError("manifest: unrecognised format");
    }
    if (j.value("version", 0) != 1) throw DataError("manifest: unsupported version");
    SyntheticManifest m;
    m.config.feature_dim = j.at("feature_dim").get<std::size_t>();
    m.config.num_samples = j.at("num_samples").get<std::size_t>();
    m.config.grid = TimeGrid(j.at("interval_size").get<double>(),
                             j.at("num_intervals").get<std::size_t>());
    m.config.weights = j.at("weights").get<std::vector<double>>();
    m.config.bias = j.at("bias").get<std::vector<double>>();
    m.config.censor_fraction_target = j.at("censor_fraction_target").get<double>();
    m.config.rng_seed = j.at("seed").get<std::uint64_t>();
    m.censor_probability = j.at("censor_probability").get<double>();
    m.uniform_censor_rate = j.at("uniform_censor_rate").get<double>();
    m.warnings = j.at("warnings").get<std::size_t>();
    m.config.validate();
    return m;
  }
};

struct SyntheticData {
  Dataset dataset;
  SyntheticManifest manifest;
};

/// Generates a dataset with known hazards. Features are iid U(0,1). The event
/// interval comes from sequential hazard draws capped at L, and z = t_{l_z}.
/// With probability censor_probability the observation time is uniform over
/// {t_1..t_L}, otherwise t_L; censor_probability is set so that the expected
/// censoring rate matches the target. Every sample keeps its true event time.
inline SyntheticData synthesize(const SyntheticConfig& config) {
  config.validate();
  const std::size_t L = config.grid.num_intervals();
  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SyntheticManifest manifest{config, 1.0, 0.0, 0};
  std::vector<SparseFeatures> features(config.num_samples);
  std::vector<std::size_t> event_interval(config.num_samples);
  double uniform_rate = 0.0;
  for (std::size_t i = 0; i < config.num_samples; ++i) {
    auto& x = features[i];
    x.reserve(config.feature_dim);
    for (std::size_t k = 0; k < config.feature_dim; ++k) {
      double v = 0.0;
      while (v == 0.0) v = unif(rng);
      x.push_back({k, v});
    }
    const auto h = true_hazards(config.weights, config.bias, x);
    bool degenerate = false;
    for (double v : h) degenerate |= v < kHazardFloor || v > kHazardCeil;
    manifest.warnings += degenerate ? 1 : 0;

    std::size_t lz = L;
    for (std::size_t l = 0; l < L; ++l) {
      if (unif(rng) < h[l]) {
        lz = l + 1;
        break;
      }
    }
    event_interval[i] = lz;
    // Pr(t_m < z) for uniform m is the mean of the capped survival S(t_1..t_L).
    double surv = 1.0, acc = 0.0;
    for (std::size_t m = 1; m < L; ++m) {
      surv *= 1.0 - h[m - 1];
      acc += surv;
    }
    uniform_rate += acc / static_cast<double>(L);
  }
  uniform_rate /= static_cast<double>(config.num_samples);
  manifest.uniform_censor_rate = uniform_rate;
  if (config.censor_fraction_target == 0.0) {
    manifest.censor_probability = 0.0;
  } else if (uniform_rate <= config.censor_fraction_target) {
    manifest.censor_probability = 1.0;
    ++manifest.warnings;
  } else {
    manifest.censor_probability = config.censor_fraction_target / uniform_rate;
  }

  std::uniform_int_distribution<std::size_t> pick_interval(1, L);
  std::vector<Sample> samples;
  samples.reserve(config.num_samples);
  for (std::size_t i = 0; i < config.num_samples; ++i) {
    const double z = config.grid.boundary(event_interval[i]);
    const bool uniform_t = unif(rng) < manifest.censor_probability;
    const std::size_t m = pick_interval(rng);
    const double t = uniform_t ? config.grid.boundary(m) : config.grid.horizon();
    std::optional<double> observed_z;
    if (t >= z) observed_z = z;
    samples.emplace_back(std::move(features[i]), t, observed_z, z);
  }
  return {Dataset(std::move(samples), config.feature_dim, config.grid), std::move(manifest)};
}

/// Generator settings used by the CLI and benchmarks: w_k ~ N(0, 12/d) so the
/// linear score has unit variance, and a baseline hazard rising from 0.04 to
/// 0.30 across the grid, centred on the mean score.
inline SyntheticConfig default_synthetic_config(std::size_t feature_dim, std::size_t num_intervals,
                                                std::size_t num_samples, double censor_target,
                                                std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.feature_dim = feature_dim;
  cfg.num_samples = num_samples;
  cfg.grid = TimeGrid(1.0, num_intervals);
  cfg.censor_fraction_target = censor_target;
  cfg.rng_seed = seed;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, std::sqrt(12.0 / static_cast<double>(feature_dim)));
  cfg.weights.resize(feature_dim);
  double mean_score = 0.0;
  for (auto& w : cfg.weights) {
    w = normal(rng);
    mean_score += 0.5 * w;
  }
  cfg.bias.resize(num_intervals);
  for (std::size_t l = 1; l <= num_intervals; ++l) {
    const double frac = static_cast<double>(l) / static_cast<double>(num_intervals);
    const double base = 0.04 + 0.26 * frac * frac;
    cfg.bias[l - 1] = std::log(base / (1.0 - base)) - mean_score;
  }
  return cfg;
}

}  // namespace drsa
