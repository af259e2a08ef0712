// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mvmt/cli/run_config.hpp"
#include "mvmt/dataset/curation.hpp"
#include "mvmt/training/trainer.hpp"

namespace mvmt::cli {

struct SynthArgs {
  std::size_t n_per_class = 8;
  double snr_db = 10.0;
  bool informative_notes = true;
};

struct PredictArgs {
  std::filesystem::path waveform;
  std::optional<std::string> note;
  std::filesystem::path embedding;  // file holding the record's embedding
  std::string record_id;            // picks a row when the file holds several
};

/// Model-ready records of the configured manifest. Notes come from the
/// embeddings file when given, else from hashing the manifest note text.
std::vector<train::Example> load_examples(const RunConfig& config, bool need_notes);

data::Splits<train::Example> split_examples(const std::vector<train::Example>& examples, const RunConfig& config);
std::uint64_t splits_hash(const data::Splits<train::Example>& splits);

void cmd_synth(const RunConfig& config, const SynthArgs& args, std::ostream& out);
void cmd_preprocess(const RunConfig& config, std::ostream& out);
void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_evaluate(const RunConfig& config, const std::string& split, std::ostream& out);
void cmd_predict(const RunConfig& config, const PredictArgs& args, std::ostream& out);
void cmd_ablate(const RunConfig& config, const std::vector<model::FusionMode>& modes, std::ostream& out);
void cmd_attention(const RunConfig& config, const std::string& record_id, std::size_t layer, std::ostream& out);

}  // namespace mvmt::cli
