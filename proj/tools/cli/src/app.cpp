// SPDX-License-Identifier: Apache-2.0
#include "mvmt/cli/app.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <functional>
#include <sstream>
#include <ostream>

#include "mvmt/cli/commands.hpp"
#include "mvmt/error.hpp"

namespace mvmt::cli {
namespace {

/// Flag values start at the built-in defaults (so --help shows them) and are
/// applied on top of the config file only when given explicitly.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, T& storage, const std::string& help,
                   std::function<void(RunConfig&, const T&)> apply) {
    CLI::Option* opt = app->add_option(flag, storage, help)->capture_default_str();
    appliers_.push_back([opt, &storage, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, storage);
    });
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& flag, bool& storage, const std::string& help,
                        std::function<void(RunConfig&, bool)> apply) {
    CLI::Option* opt = app->add_flag(flag, storage, help);
    appliers_.push_back([opt, &storage, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, storage);
    });
    return opt;
  }

  void apply(RunConfig& c) const {
    for (const auto& f : appliers_) f(c);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct Flags {
  // global
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = "mvmt_out";
  // paths
  std::string manifest, embeddings, checkpoint;
  // model
  model::ModelConfig model;
  std::string fusion_mode = "cross_attention";
  bool per_lead = false;
  // training
  train::TrainConfig train;
  // data
  std::size_t per_class_cap = 2500;
};

void add_model_flags(CLI::App* app, Flags& f, Overrides& o) {
  o.add<std::size_t>(app, "--d-model", f.model.d_model, "Token embedding width",
                     [](RunConfig& c, const std::size_t& v) { c.model.d_model = v; });
  o.add<std::size_t>(app, "--heads", f.model.n_heads, "Attention heads",
                     [](RunConfig& c, const std::size_t& v) { c.model.n_heads = v; });
  o.add<std::size_t>(app, "--encoder-layers", f.model.n_encoder_layers, "Encoder layers",
                     [](RunConfig& c, const std::size_t& v) { c.model.n_encoder_layers = v; });
  o.add<std::size_t>(app, "--decoder-layers", f.model.n_decoder_layers, "Decoder layers",
                     [](RunConfig& c, const std::size_t& v) { c.model.n_decoder_layers = v; });
  o.add<std::size_t>(app, "--feedforward-dim", f.model.feedforward_dim, "Feed-forward hidden width",
                     [](RunConfig& c, const std::size_t& v) { c.model.feedforward_dim = v; });
  o.add<double>(app, "--dropout", f.model.dropout, "Dropout rate",
                [](RunConfig& c, const double& v) { c.model.dropout = v; });
  o.add<std::string>(app, "--fusion-mode", f.fusion_mode,
                     "cross_attention, early_concat, early_sum or waveform_only",
                     [](RunConfig& c, const std::string& v) { c.model.fusion_mode = model::parse_fusion_mode(v); });
  o.add_flag(app, "--per-lead-encoders", f.per_lead, "One encoder per lead with a multi-variate attention layer",
             [](RunConfig& c, bool v) { c.model.per_lead_encoders = v; });
}

void add_train_flags(CLI::App* app, Flags& f, Overrides& o) {
  o.add<double>(app, "--lr", f.train.learning_rate, "Adam learning rate",
                [](RunConfig& c, const double& v) { c.train.learning_rate = v; });
  o.add<std::size_t>(app, "--batch-size", f.train.batch_size, "Records per optimizer step",
                     [](RunConfig& c, const std::size_t& v) { c.train.batch_size = v; });
  o.add<std::size_t>(app, "--epochs", f.train.max_epochs, "Maximum epochs",
                     [](RunConfig& c, const std::size_t& v) { c.train.max_epochs = v; });
  o.add<std::size_t>(app, "--patience", f.train.early_stop_patience, "Early-stopping patience in epochs",
                     [](RunConfig& c, const std::size_t& v) { c.train.early_stop_patience = v; });
}

void add_data_flags(CLI::App* app, Flags& f, Overrides& o, bool embeddings) {
  o.add<std::string>(app, "--manifest", f.manifest, "Record manifest CSV",
                     [](RunConfig& c, const std::string& v) { c.manifest = v; });
  if (embeddings) {
    o.add<std::string>(app, "--embeddings", f.embeddings, "Notes embeddings file (binary or CSV)",
                       [](RunConfig& c, const std::string& v) { c.embeddings = v; });
  }
}

void add_checkpoint_flag(CLI::App* app, Flags& f, Overrides& o) {
  o.add<std::string>(app, "--checkpoint", f.checkpoint, "Model checkpoint",
                     [](RunConfig& c, const std::string& v) { c.checkpoint = v; });
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::usage: return kUsage;
    case Error::Category::data: return kData;
    case Error::Category::numerical: return kNumerical;
  }
  return kData;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"MVMTnet: multi-modal transformer for 12-lead ECG classification", "mvmtnet"};
  app.require_subcommand(1);
  // Global options may follow the subcommand as well.
  app.fallthrough();
  Flags f;
  Overrides o;
  app.add_option("--config", f.config_path, "key = value config file");
  o.add<std::uint64_t>(&app, "--seed", f.seed, "Seed for splits, initialization and training",
                       [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
  o.add<std::string>(&app, "--out", f.out, "Output directory", [](RunConfig& c, const std::string& v) { c.out = v; });

  SynthArgs synth_args;
  bool uninformative = false;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset (manifest, raw waveforms, embeddings)");
  synth->add_option("--n-per-class", synth_args.n_per_class, "Single-label records per class")->capture_default_str();
  synth->add_option("--snr-db", synth_args.snr_db, "Waveform signal-to-noise ratio in dB")->capture_default_str();
  synth->add_flag("--uninformative-notes", uninformative, "Draw embeddings and notes independently of the labels");

  auto* preprocess = app.add_subcommand("preprocess", "Curate, denoise and standardize raw records");
  add_data_flags(preprocess, f, o, false);
  o.add<std::size_t>(preprocess, "--per-class-cap", f.per_class_cap, "Undersampling cap per class",
                     [](RunConfig& c, const std::size_t& v) { c.per_class_cap = v; });

  auto* train_cmd = app.add_subcommand("train", "Train with early stopping on validation error");
  add_data_flags(train_cmd, f, o, true);
  add_model_flags(train_cmd, f, o);
  add_train_flags(train_cmd, f, o);

  std::string split = "test";
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on one split");
  add_data_flags(evaluate, f, o, true);
  add_checkpoint_flag(evaluate, f, o);
  evaluate->add_option("--split", split, "train, val, test or all")->capture_default_str();

  PredictArgs predict_args;
  std::string note, embedding_file, waveform_file;
  auto* predict = app.add_subcommand("predict", "Class probabilities for one record");
  add_checkpoint_flag(predict, f, o);
  predict->add_option("--waveform", waveform_file, "Raw (12×1000) or clean (12×250) f32 waveform")->required();
  auto* note_opt = predict->add_option("--note", note, "Clinical note text (hashed into an embedding)");
  predict->add_option("--embedding", embedding_file, "Embeddings file holding the record");
  predict->add_option("--record-id", predict_args.record_id, "Record id to pick from the embeddings file");

  std::vector<std::string> mode_names{"cross_attention", "waveform_only", "early_concat", "early_sum"};
  auto* ablate = app.add_subcommand("ablate", "Train one model per fusion mode on identical splits");
  add_data_flags(ablate, f, o, true);
  add_model_flags(ablate, f, o);
  add_train_flags(ablate, f, o);
  ablate->add_option("--modes", mode_names, "Fusion modes to compare")->delimiter(',')->capture_default_str();

  std::string record_id;
  std::size_t layer = 0;
  auto* attention = app.add_subcommand("attention-map", "Export an encoder attention heatmap for one record");
  add_data_flags(attention, f, o, true);
  add_checkpoint_flag(attention, f, o);
  attention->add_option("--record", record_id, "Record id")->required();
  attention->add_option("--layer", layer, "Encoder layer index")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, help;
    const int code = app.exit(e, help, msg);
    out << help.str();
    err << msg.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    RunConfig config;
    if (!f.config_path.empty()) apply_config_file(config, f.config_path);
    o.apply(config);
    if (note_opt->count() > 0) predict_args.note = note;
    predict_args.embedding = embedding_file;
    predict_args.waveform = waveform_file;

    if (synth->parsed()) {
      synth_args.informative_notes = !uninformative;
      cmd_synth(config, synth_args, out);
    } else if (preprocess->parsed()) {
      cmd_preprocess(config, out);
    } else if (train_cmd->parsed()) {
      cmd_train(config, out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, split, out);
    } else if (predict->parsed()) {
      cmd_predict(config, predict_args, out);
    } else if (ablate->parsed()) {
      std::vector<model::FusionMode> modes;
      for (const auto& name : mode_names) modes.push_back(model::parse_fusion_mode(name));
      cmd_ablate(config, modes, out);
    } else if (attention->parsed()) {
      cmd_attention(config, record_id, layer, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace mvmt::cli
