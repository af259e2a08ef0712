// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvmt/model/config.hpp"
#include "mvmt/model/layers.hpp"
#include "mvmt/sigproc/preprocess.hpp"

namespace mvmt::model {

struct MvmtnetParams {
  // fused-encoder path
  CondenseParams condense;
  std::vector<EncoderLayerParams> encoder;
  // per-lead path
  std::vector<LeadEncoderParams> lead_encoders;
  Linear multivariate;
  // notes and fusion
  Linear notes;
  std::vector<DecoderLayerParams> decoder;
  Linear fusion_concat;
  Tensor fusion_notes_scale;
  Tensor fusion_wave_scale;
  // head
  Linear merge;
  Norm merge_norm;
  ClassifierParams classifier;

  /// Every parameter that the configured architecture uses, in a fixed order.
  std::vector<ad::NamedTensor> named;
};

MvmtnetParams init_params(const ModelConfig& config, Rng& rng);

/// Intermediate results captured by a forward pass.
struct ForwardTrace {
  std::vector<std::pair<std::string, ad::Shape>> shapes;
  std::vector<std::vector<Tensor>> encoder_attention;  // [layer][head]
  DecoderWeights decoder_attention;
  // per-lead variant
  std::vector<std::vector<std::vector<Tensor>>> lead_attention;  // [lead][layer][head]
  std::vector<Tensor> multivariate_attention;                    // [head]
  std::vector<Tensor> head_outputs;                              // [head] L×lead_dim, before pooling
  std::vector<std::vector<double>> head_vectors;                 // [head] token-mean contribution to the pool
  std::vector<double> pooled_vector;                             // sum of head_vectors

  void note(std::string name, const Tensor& t) { shapes.emplace_back(std::move(name), t.shape()); }
  const ad::Shape* shape_of(std::string_view name) const;
};

/// Converts a cleaned record to the n_leads×L input tensor.
Tensor ecg_tensor(const sigproc::CleanEcg& ecg);
Tensor ecg_tensor(std::span<const double> lead_major, std::size_t leads, std::size_t length);
Tensor notes_tensor(std::span<const double> embedding);

class Mvmtnet {
 public:
  /// Validates the config and draws fresh parameters from `seed`.
  Mvmtnet(ModelConfig config, std::uint64_t seed);
  Mvmtnet(ModelConfig config, MvmtnetParams params);

  const ModelConfig& config() const { return config_; }
  const MvmtnetParams& params() const { return params_; }
  MvmtnetParams& params() { return params_; }
  const std::vector<ad::NamedTensor>& parameters() const { return params_.named; }
  std::size_t parameter_count() const;

  /// Logits [1×n_classes]. `notes` may be undefined for waveform_only.
  /// `rng` is required in training mode when dropout is non-zero.
  Tensor logits(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train = false, Rng* rng = nullptr,
                ForwardTrace* trace = nullptr) const;

  /// Per-class probabilities [n_classes].
  Tensor forward(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train = false, Rng* rng = nullptr,
                 ForwardTrace* trace = nullptr) const;

  /// Forward pass of the per-lead encoder variant; ConfigError unless the
  /// config enables it.
  Tensor forward_per_lead(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train = false,
                          Rng* rng = nullptr, ForwardTrace* trace = nullptr) const;

  /// Evaluation-mode probabilities without recording a tape.
  std::vector<double> predict(const Tensor& ecg, const Tensor& notes, ForwardTrace* trace = nullptr) const;

  /// Overwrites parameter values with those of a model of identical layout.
  void copy_parameters_from(const Mvmtnet& other);
  /// Deep copy with independent parameter storage.
  Mvmtnet clone() const;

 private:
  Tensor encode_fused(const Context& ctx, const Tensor& ecg, ForwardTrace* trace) const;
  Tensor encode_per_lead(const Context& ctx, const Tensor& ecg, ForwardTrace* trace) const;

  ModelConfig config_;
  MvmtnetParams params_;
};

}  // namespace mvmt::model
