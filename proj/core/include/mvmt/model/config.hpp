// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvmt::model {

/// How the notes modality is merged with the encoded waveform.
enum class FusionMode { cross_attention, early_concat, early_sum, waveform_only };

std::string_view to_string(FusionMode mode);
/// Throws ConfigError for unknown names.
FusionMode parse_fusion_mode(std::string_view name);

/// Architectural hyperparameters. Defaults are the best-model configuration:
/// 120-dim tokens, 12 heads, 6 encoder and 6 decoder layers, dropout 0.2.
struct ModelConfig {
  std::size_t seq_len = 250;
  std::size_t n_leads = 12;
  std::size_t d_model = 120;
  std::size_t n_heads = 12;
  std::size_t n_encoder_layers = 6;
  std::size_t n_decoder_layers = 6;
  double dropout = 0.2;
  std::size_t notes_dim = 768;
  std::size_t n_classes = 5;
  FusionMode fusion_mode = FusionMode::cross_attention;
  bool per_lead_encoders = false;
  std::size_t feedforward_dim = 480;
  std::array<std::size_t, 3> conv_channels{4, 8, 8};
  std::array<std::size_t, 2> classifier_hidden{256, 64};
  double layer_norm_eps = 1e-5;

  /// Throws ConfigError describing the first inconsistency.
  void validate() const;

  std::size_t head_dim() const { return d_model / n_heads; }
  /// Per-lead embedding width in the per-lead encoder variant.
  std::size_t lead_dim() const { return d_model / n_leads; }
  bool uses_notes() const { return fusion_mode != FusionMode::waveform_only; }
  bool uses_decoder() const {
    return fusion_mode == FusionMode::cross_attention || fusion_mode == FusionMode::waveform_only;
  }
  /// Spatial size of the classifier feature map after three 2×2 poolings.
  std::pair<std::size_t, std::size_t> classifier_map() const;
  std::size_t classifier_flat_dim() const;

  /// Sets one key from its textual value. Returns false for keys that are
  /// not model keys; throws ConfigError for malformed values.
  bool set(std::string_view key, std::string_view value);
  std::vector<std::pair<std::string, std::string>> to_kv() const;
};

/// Small configuration for gradient checks and fast tests.
ModelConfig tiny_config();

std::string format_double(double v);

}  // namespace mvmt::model
