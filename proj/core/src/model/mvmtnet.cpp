// SPDX-License-Identifier: Apache-2.0
#include "mvmt/model/mvmtnet.hpp"

#include <algorithm>
#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::model {

MvmtnetParams init_params(const ModelConfig& config, Rng& rng) {
  config.validate();
  ParamFactory f(rng);
  MvmtnetParams p;
  const std::size_t d = config.d_model;
  if (config.per_lead_encoders) {
    const std::size_t dl = config.lead_dim();
    const std::size_t ff = config.feedforward_dim / config.n_leads;
    for (std::size_t l = 0; l < config.n_leads; ++l) {
      const std::string base = "lead" + std::to_string(l);
      LeadEncoderParams lead;
      lead.token = f.linear(base + ".token", 1, dl);
      for (std::size_t i = 0; i < config.n_encoder_layers; ++i) {
        lead.layers.push_back(f.encoder_layer(base + ".layer" + std::to_string(i), dl, ff));
      }
      p.lead_encoders.push_back(std::move(lead));
    }
    p.multivariate = f.linear("multivariate.output", d, d);
  } else {
    p.condense.kernel = f.xavier("condense.kernel", {1, 1, config.n_leads, 1}, config.n_leads, config.n_leads);
    p.condense.bias = f.constant("condense.bias", {1}, 0.0);
    p.condense.token = f.linear("condense.token", 1, d);
    for (std::size_t i = 0; i < config.n_encoder_layers; ++i) {
      p.encoder.push_back(f.encoder_layer("encoder" + std::to_string(i), d, config.feedforward_dim));
    }
  }
  if (config.uses_notes()) p.notes = f.linear("notes", config.notes_dim, d);
  switch (config.fusion_mode) {
    case FusionMode::cross_attention:
    case FusionMode::waveform_only:
      for (std::size_t i = 0; i < config.n_decoder_layers; ++i) {
        p.decoder.push_back(f.decoder_layer("decoder" + std::to_string(i), d, config.feedforward_dim));
      }
      break;
    case FusionMode::early_concat:
      p.fusion_concat = f.linear("fusion.concat", 2 * d, d);
      break;
    case FusionMode::early_sum:
      p.fusion_notes_scale = f.constant("fusion.notes_scale", {1}, 1.0);
      p.fusion_wave_scale = f.constant("fusion.wave_scale", {1}, 1.0);
      break;
  }
  p.merge = f.linear("merge", config.n_leads, d);
  p.merge_norm = f.norm("merge.norm", d);

  std::size_t in_channels = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t out = config.conv_channels[i];
    const std::string base = "classifier.conv" + std::to_string(i);
    p.classifier.conv_kernels[i] = f.xavier(base + ".kernel", {out, in_channels, 3, 3}, in_channels * 9, out * 9);
    p.classifier.conv_bias[i] = f.constant(base + ".bias", {out}, 0.0);
    in_channels = out;
  }
  const std::size_t widths[4] = {config.classifier_flat_dim(), config.classifier_hidden[0],
                                 config.classifier_hidden[1], config.n_classes};
  for (std::size_t i = 0; i < 3; ++i) {
    p.classifier.dense[i] = f.linear("classifier.dense" + std::to_string(i), widths[i], widths[i + 1]);
  }
  p.named = f.take();
  return p;
}

const ad::Shape* ForwardTrace::shape_of(std::string_view name) const {
  for (const auto& [n, s] : shapes) {
    if (n == name) return &s;
  }
  return nullptr;
}

Tensor ecg_tensor(std::span<const double> lead_major, std::size_t leads, std::size_t length) {
  if (lead_major.size() != leads * length) {
    throw ShapeError("ecg_tensor: " + std::to_string(lead_major.size()) + " samples cannot form " +
                     std::to_string(leads) + "×" + std::to_string(length));
  }
  return Tensor({leads, length}, std::vector<double>(lead_major.begin(), lead_major.end()));
}

Tensor ecg_tensor(const sigproc::CleanEcg& ecg) {
  return ecg_tensor(ecg.samples, sigproc::kLeads, sigproc::kCleanSamples);
}

Tensor notes_tensor(std::span<const double> embedding) {
  return Tensor({embedding.size()}, std::vector<double>(embedding.begin(), embedding.end()));
}

Mvmtnet::Mvmtnet(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  Rng rng(seed);
  params_ = init_params(config_, rng);
}

Mvmtnet::Mvmtnet(ModelConfig config, MvmtnetParams params) : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
}

std::size_t Mvmtnet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_.named) n += p.tensor.size();
  return n;
}

Tensor Mvmtnet::encode_fused(const Context& ctx, const Tensor& ecg, ForwardTrace* trace) const {
  Tape& tape = ctx.tape;
  const Tensor tokens = condense_leads(tape, ecg, params_.condense);
  const Tensor positioned = positional_encode(tape, tokens);
  const Tensor enc = encoder_forward(ctx, positioned, params_.encoder, config_.n_heads, config_.layer_norm_eps,
                                     trace ? &trace->encoder_attention : nullptr);
  if (trace) {
    trace->note("tokens", tokens);
    trace->note("positional", positioned);
    trace->note("encoder", enc);
  }
  return enc;
}

Tensor Mvmtnet::encode_per_lead(const Context& ctx, const Tensor& ecg, ForwardTrace* trace) const {
  Tape& tape = ctx.tape;
  const std::size_t leads = config_.n_leads;
  const std::size_t length = config_.seq_len;
  const std::size_t dl = config_.lead_dim();
  const double eps = config_.layer_norm_eps;
  const Tensor columns = ad::transpose(tape, ecg);  // L×leads
  std::vector<Tensor> heads;
  heads.reserve(leads);
  if (trace) trace->lead_attention.resize(leads);
  for (std::size_t l = 0; l < leads; ++l) {
    const auto& lp = params_.lead_encoders[l];
    const Tensor tokens = linear(tape, ad::slice_cols(tape, columns, l, 1), lp.token);
    const Tensor enc = encoder_forward(ctx, positional_encode(tape, tokens), lp.layers, 1, eps,
                                       trace ? &trace->lead_attention[l] : nullptr);
    // Head l attends over the embeddings of lead l only.
    const double scale = 1.0 / std::sqrt(static_cast<double>(dl));
    const Tensor attn = ad::softmax_rows(tape, ad::matmul_bt(tape, enc, enc, scale));
    const Tensor out = ad::matmul(tape, attn, enc);
    if (trace) {
      trace->multivariate_attention.push_back(attn);
      trace->head_outputs.push_back(out);
    }
    heads.push_back(out);
  }
  const Tensor pooled = linear(tape, ad::concat_cols(tape, heads), params_.multivariate);
  if (trace) {
    const std::size_t d = config_.d_model;
    const auto w = params_.multivariate.weight.data();
    trace->pooled_vector.assign(d, 0.0);
    for (std::size_t h = 0; h < leads; ++h) {
      std::vector<double> vec(d, 0.0);
      const auto o = heads[h].data();
      for (std::size_t t = 0; t < length; ++t) {
        for (std::size_t j = 0; j < dl; ++j) {
          const double x = o[t * dl + j];
          const double* row = w.data() + (h * dl + j) * d;
          for (std::size_t c = 0; c < d; ++c) vec[c] += x * row[c];
        }
      }
      for (std::size_t c = 0; c < d; ++c) {
        vec[c] /= static_cast<double>(length);
        trace->pooled_vector[c] += vec[c];
      }
      trace->head_vectors.push_back(std::move(vec));
    }
    trace->note("encoder", pooled);
  }
  return pooled;
}

Tensor Mvmtnet::logits(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train, Rng* rng,
                       ForwardTrace* trace) const {
  if (!ecg.defined() || ecg.rank() != 2 || ecg.dim(0) != config_.n_leads || ecg.dim(1) != config_.seq_len) {
    throw ShapeError("forward: expected " + std::to_string(config_.n_leads) + "×" + std::to_string(config_.seq_len) +
                     " waveform, got " + (ecg.defined() ? ad::shape_str(ecg.shape()) : std::string("nothing")));
  }
  if (config_.uses_notes() && (!notes.defined() || notes.size() != config_.notes_dim)) {
    throw ShapeError("forward: expected a " + std::to_string(config_.notes_dim) + "-dim notes embedding, got " +
                     (notes.defined() ? ad::shape_str(notes.shape()) : std::string("nothing")));
  }
  const Context ctx{tape, train, config_.dropout, rng};
  const double eps = config_.layer_norm_eps;
  if (trace) trace->note("input", ecg);

  const Tensor enc = config_.per_lead_encoders ? encode_per_lead(ctx, ecg, trace) : encode_fused(ctx, ecg, trace);

  Tensor fused;
  switch (config_.fusion_mode) {
    case FusionMode::cross_attention: {
      const Tensor block = notes_adapt(tape, notes, params_.notes, config_.seq_len);
      if (trace) trace->note("notes_block", block);
      fused = decoder_forward(ctx, enc, block, params_.decoder, config_.n_heads, eps,
                              trace ? &trace->decoder_attention : nullptr);
      break;
    }
    case FusionMode::waveform_only:
      fused = decoder_forward(ctx, enc, enc, params_.decoder, config_.n_heads, eps,
                              trace ? &trace->decoder_attention : nullptr);
      break;
    case FusionMode::early_concat: {
      const Tensor block = notes_adapt(tape, notes, params_.notes, config_.seq_len);
      if (trace) trace->note("notes_block", block);
      fused = linear(tape, ad::concat_cols(tape, {enc, block}), params_.fusion_concat);
      break;
    }
    case FusionMode::early_sum: {
      const Tensor block = notes_adapt(tape, notes, params_.notes, config_.seq_len);
      if (trace) trace->note("notes_block", block);
      fused = ad::add(tape, ad::scale_by(tape, block, params_.fusion_notes_scale),
                      ad::scale_by(tape, enc, params_.fusion_wave_scale));
      break;
    }
  }
  const Tensor merged = residual_merge(tape, ecg, fused, params_.merge, params_.merge_norm, eps);
  std::vector<Tensor> stages;
  const Tensor out = classifier_logits(ctx, merged, params_.classifier, trace ? &stages : nullptr);
  if (trace) {
    trace->note("decoder", fused);
    trace->note("merged", merged);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      trace->note(i < 3 ? "classifier.conv" + std::to_string(i) : "classifier.dense" + std::to_string(i - 3),
                  stages[i]);
    }
    trace->note("logits", out);
  }
  return out;
}

Tensor Mvmtnet::forward(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train, Rng* rng,
                        ForwardTrace* trace) const {
  const Tensor z = logits(tape, ecg, notes, train, rng, trace);
  const Tensor probs = ad::reshape(tape, ad::sigmoid(tape, z), {z.size()});
  if (trace) trace->note("probabilities", probs);
  return probs;
}

Tensor Mvmtnet::forward_per_lead(Tape& tape, const Tensor& ecg, const Tensor& notes, bool train, Rng* rng,
                                 ForwardTrace* trace) const {
  if (!config_.per_lead_encoders) throw ConfigError("forward_per_lead: per_lead_encoders is not enabled");
  if (config_.n_heads != config_.n_leads) {
    throw ConfigError("forward_per_lead: n_heads must equal n_leads");
  }
  return forward(tape, ecg, notes, train, rng, trace);
}

std::vector<double> Mvmtnet::predict(const Tensor& ecg, const Tensor& notes, ForwardTrace* trace) const {
  Tape tape(false);
  const Tensor p = forward(tape, ecg, notes, false, nullptr, trace);
  return {p.data().begin(), p.data().end()};
}

void Mvmtnet::copy_parameters_from(const Mvmtnet& other) {
  const auto& src = other.params_.named;
  auto& dst = params_.named;
  if (src.size() != dst.size()) throw ContractError("copy_parameters_from: parameter layouts differ");
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].name != dst[i].name || src[i].tensor.shape() != dst[i].tensor.shape()) {
      throw ContractError("copy_parameters_from: parameter " + dst[i].name + " differs in layout");
    }
    auto out = dst[i].tensor.mutable_data();
    std::copy(src[i].tensor.data().begin(), src[i].tensor.data().end(), out.begin());
  }
}

Mvmtnet Mvmtnet::clone() const {
  Mvmtnet copy(config_, 0);
  copy.copy_parameters_from(*this);
  return copy;
}

}  // namespace mvmt::model
