// drsa: simulate, train, evaluate and inspect discrete-time recurrent
// survival models from the command line.
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drsa/drsa.hpp"

namespace fs = std::filesystem;
using drsa::detail::format_double;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw drsa::Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw drsa::Error("failed writing '" + path + "'");
}

// simulate -------------------------------------------------------------------

struct SimulateOpts {
  std::size_t features = 20;
  std::size_t samples = 1000;
  std::size_t intervals = 20;
  std::uint64_t seed = 0;
  double censor_target = 0.35;
  double train_ratio = 0.8;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
  const auto cfg = drsa::default_synthetic_config(o.features, o.intervals, o.samples,
                                                  o.censor_target, o.seed);
  const auto syn = drsa::synthesize(cfg);
  const auto [train, test] = drsa::split(syn.dataset, o.train_ratio, o.seed);
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  drsa::write_csv(train, (dir / "train.csv").string());
  drsa::write_csv(test, (dir / "test.csv").string());
  std::ostringstream schema;
  drsa::dense_schema(o.features).write(schema);
  write_text((dir / "schema.txt").string(), schema.str());
  write_text((dir / "manifest.json").string(), syn.manifest.to_json().dump(1) + "\n");
  std::cout << "samples=" << syn.dataset.size() << " train=" << train.size()
            << " test=" << test.size() << " censor_rate=" << format_double(syn.dataset.censor_rate())
            << " warnings=" << syn.manifest.warnings << "\n";
  return 0;
}

// train ----------------------------------------------------------------------

struct TrainOpts {
  std::string train_csv;
  std::string schema;
  std::string ckpt;
  std::string history;
  double interval_size = 1.0;
  std::size_t intervals = 0;
  double val_ratio = 0.1;
  drsa::TrainConfig cfg;
  std::string ablation = "full";
};

int cmd_train(TrainOpts o) {
  o.cfg.ablation = drsa::ablation_from_string(o.ablation);
  const auto schema = drsa::Schema::load(o.schema);
  auto loaded = drsa::load_csv(o.train_csv, schema, {o.interval_size, o.intervals});
  const auto [train, val] = drsa::split(loaded.dataset, 1.0 - o.val_ratio, o.cfg.seed);
  const auto result = drsa::train(train, val, o.cfg, [](const drsa::EpochRecord& r) {
    std::cerr << "epoch " << r.epoch << " total=" << format_double(r.train.total)
              << " val_c_index=" << format_double(r.val_c_index) << "\n";
  });

  drsa::CheckpointMeta meta{loaded.dataset.grid(), loaded.encoder, std::nullopt};
  if (result.best_epoch) {
    meta.training = drsa::TrainingState{*result.best_epoch,
                                        result.history[*result.best_epoch].val_c_index};
  }
  drsa::save_checkpoint(result.params, meta, o.ckpt);

  const std::string history_path = o.history.empty() ? o.ckpt + ".history.csv" : o.history;
  std::ostringstream h;
  h << "epoch,l_z,l_uncensored,l_censored,l_c,total,val_c_index\n";
  for (const auto& r : result.history) {
    h << r.epoch << ',' << format_double(r.train.l_z) << ',' << format_double(r.train.l_uncensored)
      << ',' << format_double(r.train.l_censored) << ',' << format_double(r.train.l_c) << ','
      << format_double(r.train.total) << ',' << format_double(r.val_c_index) << '\n';
  }
  write_text(history_path, h.str());

  const auto curves = drsa::predict_curves(result.params, val);
  std::cout << "best_epoch="
            << (result.best_epoch ? std::to_string(*result.best_epoch) : std::string("none"))
            << "\nval_c_index=" << format_double(drsa::c_index(drsa::event_rate_matrix(curves), val))
            << "\n";
  return 0;
}

// eval -----------------------------------------------------------------------

struct EvalOpts {
  std::string model = "drsa";
  std::string ckpt;
  std::string test_csv;
  std::string train_csv;
  std::string schema;
  std::string baseline;
  bool significance = false;
  std::size_t bootstrap = 30;
  std::uint64_t seed = 0;
  double interval_size = 1.0;
  std::size_t intervals = 0;
  std::string out;
};

struct MethodCurves {
  std::string name;
  drsa::CurveMatrix event_rate;
  drsa::CurveMatrix event_prob;
};

MethodCurves km_curves(const std::string& name, const drsa::KMCurve& km, const drsa::Dataset& test) {
  MethodCurves m{name, {}, {}};
  for (const auto& s : test.samples()) {
    const auto c = drsa::km_predict(km, s);
    m.event_rate.push_back(c.event_rate);
    m.event_prob.push_back(c.event_prob);
  }
  return m;
}

drsa::CurveMatrix pick_rows(const drsa::CurveMatrix& m, const std::vector<std::size_t>& idx) {
  drsa::CurveMatrix out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(m[i]);
  return out;
}

int cmd_eval(const EvalOpts& o) {
  if (o.model != "drsa" && o.model != "km") throw UsageError("--model must be drsa or km");
  if (o.model == "drsa" && o.ckpt.empty()) throw UsageError("--ckpt is required for --model drsa");
  if (!o.baseline.empty() && o.baseline != "km") throw UsageError("--baseline must be km");
  const bool need_train = o.model == "km" || !o.baseline.empty();
  if (need_train && o.train_csv.empty()) throw UsageError("--train is required to fit KM");
  if (o.significance && o.baseline.empty()) throw UsageError("--significance needs --baseline");

  const auto schema = drsa::Schema::load(o.schema);
  std::optional<drsa::Checkpoint> ck;
  std::optional<drsa::LoadedData> train;
  drsa::GridChoice grid{o.interval_size, o.intervals};
  const drsa::FeatureEncoder* vocab = nullptr;
  if (o.model == "drsa") {
    ck = drsa::load_checkpoint(o.ckpt);
    grid = {ck->meta.grid.interval_size(), ck->meta.grid.num_intervals()};
    if (ck->meta.vocabulary) vocab = &*ck->meta.vocabulary;
  }
  if (need_train) {
    train = drsa::load_csv(o.train_csv, schema, grid, vocab);
    if (!vocab) {
      vocab = &train->encoder;
      grid = {train->dataset.grid().interval_size(), train->dataset.grid().num_intervals()};
    }
  }
  const auto test = drsa::load_csv(o.test_csv, schema, grid, vocab);
  if (ck && test.dataset.feature_dim() != ck->params.feature_dim) {
    throw drsa::ShapeMismatchError("test data feature dimension differs from checkpoint");
  }

  std::optional<drsa::KMCurve> km;
  if (need_train) km = drsa::km_fit(train->dataset);

  std::vector<MethodCurves> methods;
  if (o.model == "drsa") {
    const auto curves = drsa::predict_curves(ck->params, test.dataset);
    methods.push_back({"drsa", drsa::event_rate_matrix(curves), drsa::event_prob_matrix(curves)});
  } else {
    methods.push_back(km_curves("km", *km, test.dataset));
  }
  if (!o.baseline.empty()) {
    methods.push_back(km_curves(o.model == "km" ? "km_baseline" : "km", *km, test.dataset));
  }

  std::vector<std::pair<std::string, double>> report;
  for (const auto& m : methods) {
    report.emplace_back(m.name + ".c_index", drsa::c_index(m.event_rate, test.dataset));
    report.emplace_back(m.name + ".anlp", drsa::anlp(m.event_prob, test.dataset));
  }
  if (o.significance) {
    const auto resamples = drsa::bootstrap_indices(test.dataset.size(), o.bootstrap, o.seed);
    std::vector<std::vector<double>> cidx(2), nlp(2);
    for (const auto& idx : resamples) {
      const auto sub = drsa::subset(test.dataset, idx);
      for (std::size_t k = 0; k < 2; ++k) {
        cidx[k].push_back(drsa::c_index(pick_rows(methods[k].event_rate, idx), sub));
        nlp[k].push_back(drsa::anlp(pick_rows(methods[k].event_prob, idx), sub));
      }
    }
    const std::string pair = methods[0].name + "_vs_" + methods[1].name;
    report.emplace_back("significance." + pair + ".c_index.mann_whitney_u.p",
                        drsa::mann_whitney_u(cidx[0], cidx[1]));
    report.emplace_back("significance." + pair + ".anlp.t_test.p",
                        drsa::welch_t_test(nlp[0], nlp[1]));
  }

  std::ostringstream text, csv;
  csv << "key,value\n";
  for (const auto& [k, v] : report) {
    text << k << " = " << format_double(v) << "\n";
    csv << k << ',' << format_double(v) << "\n";
  }
  std::cout << text.str();
  if (!o.out.empty()) write_text(o.out, csv.str());
  return 0;
}

// predict --------------------------------------------------------------------

struct PredictOpts {
  std::string ckpt;
  std::string input;
  std::string schema;
  std::string out;
};

int cmd_predict(const PredictOpts& o) {
  const auto ck = drsa::load_checkpoint(o.ckpt);
  const auto schema = drsa::Schema::load(o.schema);
  const drsa::GridChoice grid{ck.meta.grid.interval_size(), ck.meta.grid.num_intervals()};
  const auto data = drsa::load_csv(o.input, schema, grid,
                                   ck.meta.vocabulary ? &*ck.meta.vocabulary : nullptr);
  if (data.dataset.feature_dim() != ck.params.feature_dim) {
    throw drsa::ShapeMismatchError("input feature dimension differs from checkpoint");
  }
  const auto curves = drsa::predict_curves(ck.params, data.dataset);
  std::ostringstream csv;
  csv << "id,l,h,S,W,p\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    for (std::size_t l = 0; l < c.hazard.size(); ++l) {
      csv << data.ids[i] << ',' << (l + 1) << ',' << format_double(c.hazard[l]) << ','
          << format_double(c.survival[l]) << ',' << format_double(c.event_rate[l]) << ','
          << format_double(c.event_prob[l]) << '\n';
    }
  }
  if (o.out.empty()) std::cout << csv.str();
  else write_text(o.out, csv.str());
  return 0;
}

// km -------------------------------------------------------------------------

struct KmOpts {
  std::string train_csv;
  std::string schema;
  double interval_size = 1.0;
  std::size_t intervals = 0;
  std::string out;
};

int cmd_km(const KmOpts& o) {
  const auto schema = drsa::Schema::load(o.schema);
  const auto data = drsa::load_csv(o.train_csv, schema, {o.interval_size, o.intervals});
  const auto km = drsa::km_fit(data.dataset);
  std::ostringstream csv;
  csv << "interval,n,d,S\n";
  for (std::size_t l = 0; l < km.survival.size(); ++l) {
    csv << (l + 1) << ',' << km.at_risk[l] << ',' << km.events[l] << ','
        << format_double(km.survival[l]) << '\n';
  }
  if (o.out.empty()) std::cout << csv.str();
  else write_text(o.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep recurrent survival analysis: simulate, train, eval, predict, km"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic dataset with known hazards");
  s->add_option("--features", sim.features, "Feature dimension")->check(CLI::PositiveNumber);
  s->add_option("--samples", sim.samples, "Number of samples")->check(CLI::PositiveNumber);
  s->add_option("--intervals", sim.intervals, "Number of grid intervals L")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--censor-target", sim.censor_target, "Target censoring rate")->check(CLI::Range(0.0, 0.999999));
  s->add_option("--train-ratio", sim.train_ratio, "Train share of the train/test split")->check(CLI::Range(0.01, 0.99));
  s->add_option("--out", sim.out, "Output directory")->required();

  TrainOpts tr;
  auto* t = app.add_subcommand("train", "Train a model and write checkpoint + history CSV");
  t->add_option("--train", tr.train_csv, "Training CSV")->required()->check(CLI::ExistingFile);
  t->add_option("--schema", tr.schema, "Schema file")->required()->check(CLI::ExistingFile);
  t->add_option("--ckpt", tr.ckpt, "Checkpoint output path")->required();
  t->add_option("--history", tr.history, "History CSV path (default <ckpt>.history.csv)");
  t->add_option("--alpha", tr.cfg.alpha, "Weight of L_z against L_c")->check(CLI::Range(0.0, 1.0));
  t->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->check(CLI::PositiveNumber);
  t->add_option("--batch", tr.cfg.batch_size, "Batch size")->check(CLI::PositiveNumber);
  t->add_option("--epochs", tr.cfg.max_epochs, "Maximum epochs");
  t->add_option("--patience", tr.cfg.patience, "Early-stop patience in epochs");
  t->add_option("--clip", tr.cfg.grad_clip_norm, "Global gradient-norm clip")->check(CLI::PositiveNumber);
  t->add_option("--ablation", tr.ablation, "Loss routing")->check(CLI::IsMember({"full", "unc_only", "cen_only"}));
  t->add_option("--seed", tr.cfg.seed, "RNG seed");
  t->add_option("--d-emb", tr.cfg.d_emb, "Embedding width")->check(CLI::PositiveNumber);
  t->add_option("--d-hid", tr.cfg.d_hid, "LSTM hidden width")->check(CLI::PositiveNumber);
  t->add_option("--val-ratio", tr.val_ratio, "Share of training rows held out for validation")->check(CLI::Range(0.01, 0.99));
  t->add_option("--interval-size", tr.interval_size, "Time units per interval")->check(CLI::PositiveNumber);
  t->add_option("--intervals", tr.intervals, "Number of intervals (0 = infer from data)");

  EvalOpts ev;
  auto* e = app.add_subcommand("eval", "Report C-index and ANLP on a test CSV");
  e->add_option("--model", ev.model, "Model to evaluate")->check(CLI::IsMember({"drsa", "km"}));
  e->add_option("--ckpt", ev.ckpt, "Checkpoint (for --model drsa)");
  e->add_option("--test", ev.test_csv, "Test CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--train", ev.train_csv, "Training CSV (to fit KM)");
  e->add_option("--schema", ev.schema, "Schema file")->required()->check(CLI::ExistingFile);
  e->add_option("--baseline", ev.baseline, "Also report a baseline")->check(CLI::IsMember({"km"}));
  e->add_flag("--significance", ev.significance, "Bootstrap significance tests model vs baseline");
  e->add_option("--bootstrap", ev.bootstrap, "Bootstrap resamples")->check(CLI::Range(2, 100000));
  e->add_option("--seed", ev.seed, "Bootstrap seed");
  e->add_option("--interval-size", ev.interval_size, "Time units per interval (model km)")->check(CLI::PositiveNumber);
  e->add_option("--intervals", ev.intervals, "Number of intervals (model km; 0 = infer)");
  e->add_option("--out", ev.out, "Also write the report as key,value CSV");

  PredictOpts pr;
  auto* p = app.add_subcommand("predict", "Write per-sample h, S, W, p curves as CSV");
  p->add_option("--ckpt", pr.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  p->add_option("--input", pr.input, "Input CSV")->required()->check(CLI::ExistingFile);
  p->add_option("--schema", pr.schema, "Schema file")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pr.out, "Output CSV (default stdout)");

  KmOpts km;
  auto* k = app.add_subcommand("km", "Fit Kaplan-Meier and print interval,n,d,S");
  k->add_option("--train", km.train_csv, "CSV to fit on")->required()->check(CLI::ExistingFile);
  k->add_option("--schema", km.schema, "Schema file")->required()->check(CLI::ExistingFile);
  k->add_option("--interval-size", km.interval_size, "Time units per interval")->check(CLI::PositiveNumber);
  k->add_option("--intervals", km.intervals, "Number of intervals (0 = infer)");
  k->add_option("--out", km.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*p) return cmd_predict(pr);
    if (*k) return cmd_km(km);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
