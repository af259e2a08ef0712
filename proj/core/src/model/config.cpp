// SPDX-License-Identifier: Apache-2.0
#include "mvmt/model/config.hpp"

#include <charconv>
#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::model {
namespace {

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("invalid integer for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("invalid number for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

template <std::size_t N>
std::array<std::size_t, N> parse_list(std::string_view key, std::string_view v) {
  std::array<std::size_t, N> out{};
  std::size_t at = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto comma = v.find(',', at);
    const bool last = i + 1 == N;
    if (last != (comma == std::string_view::npos)) {
      throw ConfigError(std::string(key) + " needs exactly " + std::to_string(N) + " comma-separated values");
    }
    out[i] = parse_size(key, v.substr(at, last ? v.size() - at : comma - at));
    at = comma + 1;
  }
  return out;
}

template <std::size_t N>
std::string join(const std::array<std::size_t, N>& values) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::cross_attention: return "cross_attention";
    case FusionMode::early_concat: return "early_concat";
    case FusionMode::early_sum: return "early_sum";
    case FusionMode::waveform_only: return "waveform_only";
  }
  return "unknown";
}

FusionMode parse_fusion_mode(std::string_view name) {
  for (auto mode : {FusionMode::cross_attention, FusionMode::early_concat, FusionMode::early_sum,
                    FusionMode::waveform_only}) {
    if (to_string(mode) == name) return mode;
  }
  throw ConfigError("unknown fusion mode '" + std::string(name) +
                    "' (expected cross_attention, early_concat, early_sum or waveform_only)");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("model config: " + msg); };
  if (seq_len == 0 || n_leads == 0 || d_model == 0 || n_heads == 0) fail("dimensions must be positive");
  if (d_model % n_heads != 0) {
    fail("d_model " + std::to_string(d_model) + " is not divisible by n_heads " + std::to_string(n_heads));
  }
  if (n_encoder_layers == 0) fail("n_encoder_layers must be at least 1");
  if (uses_decoder() && n_decoder_layers == 0) fail("n_decoder_layers must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must be in [0, 1)");
  if (notes_dim == 0) fail("notes_dim must be positive");
  if (n_classes != 5) fail("n_classes must be 5");
  if (feedforward_dim == 0) fail("feedforward_dim must be positive");
  if (!(layer_norm_eps > 0.0)) fail("layer_norm_eps must be positive");
  for (auto c : conv_channels) {
    if (c == 0) fail("conv_channels must be positive");
  }
  for (auto h : classifier_hidden) {
    if (h == 0) fail("classifier_hidden must be positive");
  }
  const auto [h, w] = classifier_map();
  if (h == 0 || w == 0) fail("seq_len and d_model must be at least 8 for the classifier poolings");
  if (per_lead_encoders) {
    if (n_heads != n_leads) {
      fail("per-lead encoders need n_heads == n_leads (" + std::to_string(n_heads) + " != " +
           std::to_string(n_leads) + ")");
    }
    if (d_model % n_leads != 0) fail("per-lead encoders need d_model divisible by n_leads");
    if (lead_dim() < 2) fail("per-lead embedding width must be at least 2");
    if (feedforward_dim % n_leads != 0) fail("per-lead encoders need feedforward_dim divisible by n_leads");
  }
  if (d_model < 2) fail("d_model must be at least 2");
}

std::pair<std::size_t, std::size_t> ModelConfig::classifier_map() const {
  return {seq_len / 8, d_model / 8};
}

std::size_t ModelConfig::classifier_flat_dim() const {
  const auto [h, w] = classifier_map();
  return conv_channels[2] * h * w;
}

bool ModelConfig::set(std::string_view key, std::string_view value) {
  if (key == "seq_len") seq_len = parse_size(key, value);
  else if (key == "n_leads") n_leads = parse_size(key, value);
  else if (key == "d_model") d_model = parse_size(key, value);
  else if (key == "n_heads") n_heads = parse_size(key, value);
  else if (key == "n_encoder_layers") n_encoder_layers = parse_size(key, value);
  else if (key == "n_decoder_layers") n_decoder_layers = parse_size(key, value);
  else if (key == "dropout") dropout = parse_double(key, value);
  else if (key == "notes_dim") notes_dim = parse_size(key, value);
  else if (key == "n_classes") n_classes = parse_size(key, value);
  else if (key == "fusion_mode") fusion_mode = parse_fusion_mode(value);
  else if (key == "per_lead_encoders") per_lead_encoders = parse_bool(key, value);
  else if (key == "feedforward_dim") feedforward_dim = parse_size(key, value);
  else if (key == "conv_channels") conv_channels = parse_list<3>(key, value);
  else if (key == "classifier_hidden") classifier_hidden = parse_list<2>(key, value);
  else if (key == "layer_norm_eps") layer_norm_eps = parse_double(key, value);
  else return false;
  return true;
}

std::vector<std::pair<std::string, std::string>> ModelConfig::to_kv() const {
  return {
      {"seq_len", std::to_string(seq_len)},
      {"n_leads", std::to_string(n_leads)},
      {"d_model", std::to_string(d_model)},
      {"n_heads", std::to_string(n_heads)},
      {"n_encoder_layers", std::to_string(n_encoder_layers)},
      {"n_decoder_layers", std::to_string(n_decoder_layers)},
      {"dropout", format_double(dropout)},
      {"notes_dim", std::to_string(notes_dim)},
      {"n_classes", std::to_string(n_classes)},
      {"fusion_mode", std::string(to_string(fusion_mode))},
      {"per_lead_encoders", per_lead_encoders ? "true" : "false"},
      {"feedforward_dim", std::to_string(feedforward_dim)},
      {"conv_channels", join(conv_channels)},
      {"classifier_hidden", join(classifier_hidden)},
      {"layer_norm_eps", format_double(layer_norm_eps)},
  };
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.seq_len = 16;
  c.d_model = 8;
  c.n_heads = 2;
  c.n_encoder_layers = 1;
  c.n_decoder_layers = 1;
  c.feedforward_dim = 32;
  c.conv_channels = {2, 3, 3};
  c.classifier_hidden = {8, 6};
  return c;
}

}  // namespace mvmt::model
