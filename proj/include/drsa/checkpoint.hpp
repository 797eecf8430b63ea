#pragma once

// Versioned JSON checkpoint. Floats are written in shortest round-trip form,
// so save -> load reproduces parameters bit for bit and save -> load -> save
// reproduces the file byte for byte.
//
// {
//   "format": "drsa-checkpoint", "version": 1,
//   "grid":  {"interval_size": 1.0, "num_intervals": 20},
//   "model": {"feature_dim": 20, "d_emb": 32, "d_hid": 64, "time_encoding": "scalar"},
//   "vocabulary": {...} | null,
//   "tensors": [{"name": "embedding", "shape": [20, 32], "order": "column_major",
//                "data": [...]}, ...],
//   "training": {"epoch": 7, "best_val_c_index": 0.71} | null
// }

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "drsa/core.hpp"
#include "drsa/data.hpp"
#include "drsa/nn.hpp"

namespace drsa {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  using Error::Error;
};

struct TrainingState {
  std::size_t epoch = 0;
  double best_val_c_index = 0.0;
};

struct CheckpointMeta {
  TimeGrid grid{1.0, 1};
  std::optional<FeatureEncoder> vocabulary;
  std::optional<TrainingState> training;
};

struct Checkpoint {
  ModelParams params;
  CheckpointMeta meta;
};

/// Dimensions a caller expects; unset fields are not checked.
struct ExpectedDims {
  std::optional<std::size_t> feature_dim;
  std::optional<std::size_t> d_emb;
  std::optional<std::size_t> d_hid;
};

inline std::string checkpoint_to_string(const ModelParams& params, const CheckpointMeta& meta) {
  params.check_shapes();
  nlohmann::json j;
  j["format"] = "drsa-checkpoint";
  j["version"] = kCheckpointVersion;
  j["grid"] = {{"interval_size", meta.grid.interval_size()},
               {"num_intervals", meta.grid.num_intervals()}};
  j["model"] = {{"feature_dim", params.feature_dim},
                {"d_emb", params.d_emb},
                {"d_hid", params.d_hid},
                {"time_encoding", "scalar"}};
  j["vocabulary"] = meta.vocabulary ? meta.vocabulary->to_json() : nlohmann::json(nullptr);
  auto arr = nlohmann::json::array();
  for (const auto& t : tensors(params)) {
    arr.push_back({{"name", t.name},
                   {"shape", {t.shape[0], t.shape[1]}},
                   {"order", "column_major"},
                   {"data", std::vector<double>(t.data.begin(), t.data.end())}});
  }
  j["tensors"] = std::move(arr);
  j["training"] = meta.training ? nlohmann::json{{"epoch", meta.training->epoch},
                                                 {"best_val_c_index",
                                                  meta.training->best_val_c_index}}
                                : nlohmann::json(nullptr);
  return j.dump(1) + "\n";
}

inline Checkpoint checkpoint_from_string(const std::string& text, const ExpectedDims& expect = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  try {
    if (j.value("format", "") != "drsa-checkpoint") {
      throw CheckpointError("corrupt checkpoint: not a drsa checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint version " + std::to_string(version) +
                            " unsupported (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    const auto& model = j.at("model");
    if (model.value("time_encoding", "scalar") != "scalar") {
      throw CheckpointError("checkpoint uses an unsupported time encoding");
    }
    const auto fd = model.at("feature_dim").get<std::size_t>();
    const auto de = model.at("d_emb").get<std::size_t>();
    const auto dh = model.at("d_hid").get<std::size_t>();
    auto mismatch = [](const char* what, std::size_t want, std::size_t got) {
      throw ShapeMismatchError(std::string("checkpoint ") + what + " is " + std::to_string(got) +
                               ", requested " + std::to_string(want));
    };
    if (expect.feature_dim && *expect.feature_dim != fd) mismatch("feature_dim", *expect.feature_dim, fd);
    if (expect.d_emb && *expect.d_emb != de) mismatch("d_emb", *expect.d_emb, de);
    if (expect.d_hid && *expect.d_hid != dh) mismatch("d_hid", *expect.d_hid, dh);

    Checkpoint ck{ModelParams::zeros(fd, de, dh), {}};
    const auto& tarr = j.at("tensors");
    auto views = tensors(ck.params);
    if (tarr.size() != views.size()) {
      throw ShapeMismatchError("checkpoint has " + std::to_string(tarr.size()) +
                               " tensors, expected " + std::to_string(views.size()));
    }
    for (std::size_t k = 0; k < views.size(); ++k) {
      const auto& t = tarr[k];
      const auto name = t.at("name").get<std::string>();
      if (name != views[k].name) {
        throw ShapeMismatchError("checkpoint tensor " + std::to_string(k) + " is '" + name +
                                 "', expected '" + std::string(views[k].name) + "'");
      }
      if (t.value("order", "column_major") != "column_major") {
        throw CheckpointError("checkpoint tensor '" + name + "' has unsupported order");
      }
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2 || shape[0] != views[k].shape[0] || shape[1] != views[k].shape[1]) {
        throw ShapeMismatchError("checkpoint tensor '" + name +
                                 "' shape disagrees with declared hyperparameters");
      }
      const auto& data = t.at("data");
      if (data.size() != views[k].data.size()) {
        throw ShapeMismatchError("checkpoint tensor '" + name + "' has wrong element count");
      }
      for (std::size_t e = 0; e < data.size(); ++e) views[k].data[e] = data[e].get<double>();
    }
    const auto& g = j.at("grid");
    ck.meta.grid = TimeGrid(g.at("interval_size").get<double>(),
                            g.at("num_intervals").get<std::size_t>());
    if (!j.at("vocabulary").is_null()) {
      ck.meta.vocabulary = FeatureEncoder::from_json(j.at("vocabulary"));
    }
    if (j.contains("training") && !j.at("training").is_null()) {
      ck.meta.training = TrainingState{j["training"].at("epoch").get<std::size_t>(),
                                       j["training"].at("best_val_c_index").get<double>()};
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_string(params, meta);
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path, const ExpectedDims& expect = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str(), expect);
}

}  // namespace drsa
