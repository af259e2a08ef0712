// SPDX-License-Identifier: Apache-2.0
#include "mvmt/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "mvmt/analysis/heatmap.hpp"
#include "mvmt/analysis/similarity.hpp"
#include "mvmt/dataset/embeddings.hpp"
#include "mvmt/dataset/manifest.hpp"
#include "mvmt/dataset/synth.hpp"
#include "mvmt/dataset/waveform_io.hpp"
#include "mvmt/error.hpp"
#include "mvmt/model/checkpoint.hpp"
#include "mvmt/sigproc/preprocess.hpp"
#include "mvmt/training/history.hpp"
#include "mvmt/training/metrics.hpp"

namespace mvmt::cli {
namespace fs = std::filesystem;
namespace {

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file << text;
  if (!file) throw IoError("failed writing " + path.string());
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string percent(double v) { return fixed(100.0 * v, 2) + "%"; }

void print_class_counts(std::ostream& out, std::span<const data::RecordMeta> records) {
  const auto counts = data::class_counts(records);
  out << "records: " << records.size() << "\n";
  for (std::size_t c = 0; c < data::kNumClasses; ++c) out << "  " << data::kClassCodes[c] << ": " << counts[c] << "\n";
}

void print_split_counts(std::ostream& out, std::span<const train::Example> split) {
  std::array<std::size_t, data::kNumClasses> counts{};
  for (const auto& ex : split) {
    for (std::size_t c = 0; c < data::kNumClasses; ++c) counts[c] += ex.labels.test(c) ? 1 : 0;
  }
  out << "records: " << split.size() << "\n";
  for (std::size_t c = 0; c < data::kNumClasses; ++c) out << "  " << data::kClassCodes[c] << ": " << counts[c] << "\n";
}

model::Mvmtnet load_model(const RunConfig& config) {
  require_file(config.checkpoint, "checkpoint");
  return model::load_checkpoint(config.checkpoint);
}

/// Reads a waveform file of either size: raw records are preprocessed.
sigproc::CleanEcg read_any_waveform(const fs::path& path, const std::string& id) {
  require_file(path, "waveform");
  const auto bytes = fs::file_size(path);
  if (bytes == sigproc::kLeads * sigproc::kRawSamples * 4) return sigproc::preprocess(data::read_raw_waveform(path, id));
  return data::read_clean_waveform(path, id);
}

struct TrainedRun {
  model::Mvmtnet model;
  train::FitResult fit;
};

TrainedRun train_on(const RunConfig& config, const data::Splits<train::Example>& splits,
                    const train::EpochCallback& on_epoch) {
  model::Mvmtnet net(config.model, config.seed);
  auto fit = train::fit_with_early_stop(net, splits.train, splits.val, config.train_config(), on_epoch);
  return {std::move(net), std::move(fit)};
}

std::string probability_csv(std::span<const train::Example> split, const train::EvalResult& eval) {
  std::string out = "record_id";
  for (auto code : data::kClassCodes) out += std::string(",p_") + std::string(code);
  out += ",labels\n";
  for (std::size_t i = 0; i < split.size(); ++i) {
    out += data::csv_field(split[i].record_id);
    for (double p : eval.probabilities[i]) out += "," + fixed(p);
    out += "," + split[i].labels.to_string() + "\n";
  }
  return out;
}

}  // namespace

std::vector<train::Example> load_examples(const RunConfig& config, bool need_notes) {
  require_file(config.manifest, "manifest");
  const auto records = data::read_manifest(config.manifest);
  data::EmbeddingTable table;
  if (need_notes && !config.embeddings.empty()) {
    require_file(config.embeddings, "embeddings");
    table = data::load_embeddings(config.embeddings);
  }
  std::vector<train::Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto clean = data::read_clean_waveform(data::resolve_waveform(config.manifest, r.waveform_path), r.record_id);
    ad::Tensor notes;
    if (need_notes) {
      if (auto it = table.find(r.record_id); it != table.end()) {
        notes = model::notes_tensor(it->second);
      } else if (config.embeddings.empty() && !r.note_text.empty()) {
        notes = model::notes_tensor(data::toy_embed(r.note_text));
      } else {
        throw CurationError("record " + r.record_id + " has no notes embedding");
      }
    }
    out.push_back(train::Example::make(r.record_id, model::ecg_tensor(clean), notes, r.labels));
  }
  return out;
}

data::Splits<train::Example> split_examples(const std::vector<train::Example>& examples, const RunConfig& config) {
  return data::split(examples, config.split_spec());
}

std::uint64_t splits_hash(const data::Splits<train::Example>& splits) {
  std::vector<std::string> ids;
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    for (const auto& ex : *part) ids.push_back(ex.record_id);
    ids.emplace_back("|");
  }
  return data::split_hash(ids);
}

void cmd_synth(const RunConfig& config, const SynthArgs& args, std::ostream& out) {
  if (args.n_per_class == 0) throw ConfigError("n-per-class must be at least 1");
  data::SynthOptions options{args.n_per_class, config.seed, args.informative_notes, args.snr_db};
  const auto records = data::synth_dataset(options);
  data::write_synth_dataset(records, config.out);
  std::vector<data::RecordMeta> metas;
  for (const auto& r : records) metas.push_back(r.meta);
  out << "wrote synthetic dataset to " << config.out.string() << "\n";
  print_class_counts(out, metas);
}

void cmd_preprocess(const RunConfig& config, std::ostream& out) {
  require_file(config.manifest, "manifest");
  if (config.per_class_cap == 0) throw ConfigError("per_class_cap must be at least 1");
  auto records = data::read_manifest(config.manifest);
  const std::size_t read = records.size();
  records = data::drop_blank_reports(std::move(records));
  const std::size_t blank = read - records.size();
  records = data::balance_undersample(records, config.per_class_cap, config.seed);

  // Parse and clean everything before touching the output directory.
  std::vector<sigproc::CleanEcg> cleaned;
  cleaned.reserve(records.size());
  for (const auto& r : records) {
    const auto raw = data::read_raw_waveform(data::resolve_waveform(config.manifest, r.waveform_path), r.record_id);
    cleaned.push_back(sigproc::preprocess(raw));
  }

  fs::create_directories(config.out / "clean");
  std::vector<data::RecordMeta> curated;
  for (std::size_t i = 0; i < records.size(); ++i) {
    data::RecordMeta m = records[i];
    m.waveform_path = "clean/" + m.record_id + ".f32";
    data::write_clean_waveform(config.out / m.waveform_path, cleaned[i]);
    curated.push_back(std::move(m));
  }
  data::write_manifest(config.out / "manifest.csv", curated);
  out << "read " << read << " records, dropped " << blank << " with blank reports, kept " << curated.size()
      << " after balancing (cap " << config.per_class_cap << ")\n";
  print_class_counts(out, curated);
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto& m = config.model;
  const auto t = config.train_config();
  out << "lr=" << general(t.learning_rate) << " batch=" << t.batch_size << " d_model=" << m.d_model
      << " heads=" << m.n_heads << " layers=" << m.n_encoder_layers << " decoder_layers=" << m.n_decoder_layers
      << " dropout=" << general(m.dropout) << " fusion=" << model::to_string(m.fusion_mode)
      << " per_lead=" << (m.per_lead_encoders ? "true" : "false") << " seed=" << config.seed << "\n";

  const auto examples = load_examples(config, m.uses_notes());
  const auto splits = split_examples(examples, config);
  out << "split train=" << splits.train.size() << " val=" << splits.val.size() << " test=" << splits.test.size()
      << "\n";
  fs::create_directories(config.out);

  auto run = train_on(config, splits, [&](const train::EpochStats& s) {
    out << "epoch " << s.epoch << " train_loss=" << fixed(s.train_loss) << " val_loss=" << fixed(s.val_loss)
        << " train_error=" << fixed(s.train_error) << " val_error=" << fixed(s.val_error) << std::endl;
  });
  model::save_checkpoint(config.out / "model.ckpt", run.model);
  analysis::export_history(run.fit.history, config.out / "history");
  write_text(config.out / "run.cfg", config.to_text());
  std::string summary;
  summary += "best_epoch=" + std::to_string(run.fit.best_epoch) + "\n";
  summary += "best_val_error=" + fixed(run.fit.best_val_error) + "\n";
  summary += "epochs_run=" + std::to_string(run.fit.history.size()) + "\n";
  summary += "stopped_early=" + std::string(run.fit.stopped_early ? "true" : "false") + "\n";
  summary += "split_hash=" + std::to_string(splits_hash(splits)) + "\n";
  write_text(config.out / "summary.txt", summary);
  out << "best epoch " << run.fit.best_epoch << " (val error " << fixed(run.fit.best_val_error) << "), checkpoint "
      << (config.out / "model.ckpt").string() << "\n";
}

void cmd_evaluate(const RunConfig& config, const std::string& split, std::ostream& out) {
  if (split != "train" && split != "val" && split != "test" && split != "all") {
    throw ConfigError("split must be one of train, val, test, all");
  }
  const auto net = load_model(config);
  const auto examples = load_examples(config, net.config().uses_notes());
  std::vector<train::Example> chosen;
  if (split == "all") {
    chosen = examples;
  } else {
    auto splits = split_examples(examples, config);
    chosen = split == "train" ? splits.train : split == "val" ? splits.val : splits.test;
  }
  const auto eval = train::evaluate(net, chosen);
  fs::create_directories(config.out);
  write_text(config.out / ("probabilities_" + split + ".csv"), probability_csv(chosen, eval));
  out << "split " << split << ": loss=" << fixed(eval.loss) << " accuracy=" << fixed(eval.accuracy) << " ("
      << percent(eval.accuracy) << ")\n";
  print_split_counts(out, chosen);
}

void cmd_predict(const RunConfig& config, const PredictArgs& args, std::ostream& out) {
  const auto net = load_model(config);
  const auto clean = read_any_waveform(args.waveform, args.record_id.empty() ? "input" : args.record_id);
  ad::Tensor notes;
  if (net.config().uses_notes()) {
    if (!args.embedding.empty()) {
      require_file(args.embedding, "embedding");
      const auto table = data::load_embeddings(args.embedding);
      if (!args.record_id.empty()) {
        auto it = table.find(args.record_id);
        if (it == table.end()) throw CurationError("no embedding for record " + args.record_id);
        notes = model::notes_tensor(it->second);
      } else if (table.size() == 1) {
        notes = model::notes_tensor(table.begin()->second);
      } else {
        throw ConfigError("embedding file holds several records; pass --record-id");
      }
    } else if (args.note && !args.note->empty()) {
      notes = model::notes_tensor(data::toy_embed(*args.note));
    } else {
      throw ConfigError("fusion mode " + std::string(model::to_string(net.config().fusion_mode)) +
                        " needs --note or --embedding");
    }
  }
  const auto probs = net.predict(model::ecg_tensor(clean), notes);
  std::vector<std::string> flagged;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    out << data::kClassCodes[c] << " " << fixed(probs[c]) << "\n";
    if (probs[c] > 0.5) flagged.emplace_back(data::kClassCodes[c]);
  }
  out << "flagged:";
  for (const auto& f : flagged) out << " " << f;
  out << (flagged.empty() ? " none\n" : "\n");
  out << "most probable: " << data::kClassCodes[train::argmax(probs)] << "\n";
}

void cmd_ablate(const RunConfig& config, const std::vector<model::FusionMode>& modes, std::ostream& out) {
  if (modes.size() < 2) throw ConfigError("ablation needs at least two fusion modes");
  config.validate();
  bool need_notes = false;
  for (auto mode : modes) need_notes = need_notes || mode != model::FusionMode::waveform_only;
  const auto examples = load_examples(config, need_notes);
  const auto splits = split_examples(examples, config);
  const auto hash = splits_hash(splits);
  fs::create_directories(config.out);

  std::string table = "mode,train_accuracy,val_accuracy,test_accuracy,val_loss,best_epoch,split_hash,status\n";
  for (auto mode : modes) {
    RunConfig run_config = config;
    run_config.model.fusion_mode = mode;
    const std::string name(model::to_string(mode));
    out << "== " << name << " ==" << std::endl;
    try {
      auto run = train_on(run_config, splits, [&](const train::EpochStats& s) {
        out << "epoch " << s.epoch << " val_error=" << fixed(s.val_error) << std::endl;
      });
      const auto tr = train::evaluate(run.model, splits.train);
      const auto va = train::evaluate(run.model, splits.val);
      const auto te = train::evaluate(run.model, splits.test);
      table += name + "," + fixed(tr.accuracy) + "," + fixed(va.accuracy) + "," + fixed(te.accuracy) + "," +
               fixed(va.loss) + "," + std::to_string(run.fit.best_epoch) + "," + std::to_string(hash) + ",ok\n";
      out << name << ": train " << percent(tr.accuracy) << " val " << percent(va.accuracy) << " test "
          << percent(te.accuracy) << "\n";
    } catch (const Error& e) {
      table += name + ",,,,,," + std::to_string(hash) + "," + data::quote_csv(std::string("failed: ") + e.what()) + "\n";
      out << name << ": failed: " << e.what() << "\n";
    }
  }
  write_text(config.out / "ablation.csv", table);
}

void cmd_attention(const RunConfig& config, const std::string& record_id, std::size_t layer, std::ostream& out) {
  const auto net = load_model(config);
  const auto examples = load_examples(config, net.config().uses_notes());
  const train::Example* found = nullptr;
  for (const auto& ex : examples) {
    if (ex.record_id == record_id) found = &ex;
  }
  if (!found) throw ConfigError("record " + record_id + " is not in the manifest");
  const auto heat = analysis::attention_heatmap(net, found->ecg, found->notes, layer, record_id);
  fs::create_directories(config.out);
  const fs::path stem = config.out / ("attention_" + record_id + "_layer" + std::to_string(layer));
  analysis::export_heatmap(heat, stem);
  out << "wrote " << stem.string() << ".csv and " << stem.string() << ".pgm\n";
}

}  // namespace mvmt::cli
