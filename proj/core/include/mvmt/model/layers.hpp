// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mvmt/autodiff/ops.hpp"
#include "mvmt/autodiff/tape.hpp"
#include "mvmt/autodiff/tensor.hpp"
#include "mvmt/random.hpp"

namespace mvmt::model {

using ad::Tape;
using ad::Tensor;

/// y = x·weight + bias with weight stored in×out.
struct Linear {
  Tensor weight;
  Tensor bias;
};

struct Norm {
  Tensor gain;
  Tensor shift;
};

struct AttentionParams {
  Linear query, key, value, output;
};

struct FeedForwardParams {
  Linear expand, contract;
};

struct EncoderLayerParams {
  AttentionParams attention;
  Norm norm1;
  FeedForwardParams feedforward;
  Norm norm2;
};

struct DecoderLayerParams {
  AttentionParams self_attention;
  Norm norm1;
  AttentionParams cross_attention;
  Norm norm2;
  FeedForwardParams feedforward;
  Norm norm3;
};

/// Lead condensation: a kernel spanning all leads with width one, then a
/// scalar-to-token projection.
struct CondenseParams {
  Tensor kernel;  // 1×1×n_leads×1
  Tensor bias;    // 1
  Linear token;   // 1→d_model
};

struct LeadEncoderParams {
  Linear token;  // 1→lead_dim
  std::vector<EncoderLayerParams> layers;
};

struct ClassifierParams {
  std::array<Tensor, 3> conv_kernels;
  std::array<Tensor, 3> conv_bias;
  std::array<Linear, 3> dense;
};

/// Creates parameters with Xavier-uniform weights, zero biases and unit
/// layer-norm gains, registering each under a dotted name.
class ParamFactory {
 public:
  explicit ParamFactory(Rng& rng) : rng_(rng) {}

  Tensor xavier(const std::string& name, ad::Shape shape, std::size_t fan_in, std::size_t fan_out);
  Tensor constant(const std::string& name, ad::Shape shape, double value);

  Linear linear(const std::string& name, std::size_t in, std::size_t out);
  Norm norm(const std::string& name, std::size_t width);
  AttentionParams attention(const std::string& name, std::size_t d_model);
  FeedForwardParams feedforward(const std::string& name, std::size_t d_model, std::size_t hidden);
  EncoderLayerParams encoder_layer(const std::string& name, std::size_t d_model, std::size_t hidden);
  DecoderLayerParams decoder_layer(const std::string& name, std::size_t d_model, std::size_t hidden);

  std::vector<ad::NamedTensor> take() { return std::move(registry_); }

 private:
  Tensor add(const std::string& name, Tensor t);

  Rng& rng_;
  std::vector<ad::NamedTensor> registry_;
};

/// Shared state of one forward pass.
struct Context {
  Tape& tape;
  bool train = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when train and dropout > 0

  Tensor drop(const Tensor& x) const;
};

Tensor linear(Tape& tape, const Tensor& x, const Linear& p);
Tensor norm(Tape& tape, const Tensor& x, const Norm& p, double eps);

/// x[n_leads×L] → tokens[L×d_model].
Tensor condense_leads(Tape& tape, const Tensor& x, const CondenseParams& p);

/// Fixed sinusoidal table: PE(pos,2i) = sin(pos/10000^(2i/d)), PE(pos,2i+1) = cos(·).
Tensor positional_encoding(std::size_t length, std::size_t width);
Tensor positional_encode(Tape& tape, const Tensor& tokens);

/// Scaled dot-product attention over `heads` column blocks. When `weights` is
/// given, the per-head Lq×Lk attention matrices are appended to it.
Tensor multi_head_attention(Tape& tape, const Tensor& q, const Tensor& k, const Tensor& v,
                            const AttentionParams& p, std::size_t heads,
                            std::vector<Tensor>* weights = nullptr);

Tensor feedforward(const Context& ctx, const Tensor& x, const FeedForwardParams& p);

Tensor encoder_layer(const Context& ctx, const Tensor& x, const EncoderLayerParams& p, std::size_t heads,
                     double eps, std::vector<Tensor>* weights = nullptr);

/// Runs every encoder layer; `weights`, if given, receives one entry of
/// per-head matrices per layer.
Tensor encoder_forward(const Context& ctx, const Tensor& x, const std::vector<EncoderLayerParams>& layers,
                       std::size_t heads, double eps, std::vector<std::vector<Tensor>>* weights = nullptr);

/// notes[notes_dim] → block[seq_len×d_model] with every row equal.
Tensor notes_adapt(Tape& tape, const Tensor& notes, const Linear& p, std::size_t seq_len);

struct DecoderWeights {
  std::vector<std::vector<Tensor>> self_attention;
  std::vector<std::vector<Tensor>> cross_attention;
};

/// Stage i reads notes_block (plus the previous stage output for i > 0) as
/// its stream; enc_out is the key/value memory of every cross-attention.
Tensor decoder_forward(const Context& ctx, const Tensor& enc_out, const Tensor& notes_block,
                       const std::vector<DecoderLayerParams>& layers, std::size_t heads, double eps,
                       DecoderWeights* weights = nullptr);

/// norm(rawᵀ·merge + dec_out) with raw[n_leads×L].
Tensor residual_merge(Tape& tape, const Tensor& raw, const Tensor& dec_out, const Linear& merge,
                      const Norm& merge_norm, double eps);

/// x[L×d] as a one-channel map → logits[1×n_classes]. `stages`, if given,
/// receives the output of each convolution stage and each dense layer.
Tensor classifier_logits(const Context& ctx, const Tensor& x, const ClassifierParams& p,
                         std::vector<Tensor>* stages = nullptr);

/// Sigmoid of classifier_logits, flattened to [n_classes].
Tensor classifier_forward(const Context& ctx, const Tensor& x, const ClassifierParams& p);

}  // namespace mvmt::model
