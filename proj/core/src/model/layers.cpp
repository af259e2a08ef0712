// SPDX-License-Identifier: Apache-2.0
#include "mvmt/model/layers.hpp"

#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::model {

Tensor ParamFactory::add(const std::string& name, Tensor t) {
  registry_.push_back({name, t});
  return t;
}

Tensor ParamFactory::xavier(const std::string& name, ad::Shape shape, std::size_t fan_in, std::size_t fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(ad::shape_size(shape));
  for (auto& v : data) v = rng_.uniform(-limit, limit);
  return add(name, Tensor(std::move(shape), std::move(data), true));
}

Tensor ParamFactory::constant(const std::string& name, ad::Shape shape, double value) {
  return add(name, Tensor::full(std::move(shape), value, true));
}

Linear ParamFactory::linear(const std::string& name, std::size_t in, std::size_t out) {
  Linear l;
  l.weight = xavier(name + ".weight", {in, out}, in, out);
  l.bias = constant(name + ".bias", {out}, 0.0);
  return l;
}

Norm ParamFactory::norm(const std::string& name, std::size_t width) {
  return {constant(name + ".gain", {width}, 1.0), constant(name + ".shift", {width}, 0.0)};
}

AttentionParams ParamFactory::attention(const std::string& name, std::size_t d_model) {
  return {linear(name + ".query", d_model, d_model), linear(name + ".key", d_model, d_model),
          linear(name + ".value", d_model, d_model), linear(name + ".output", d_model, d_model)};
}

FeedForwardParams ParamFactory::feedforward(const std::string& name, std::size_t d_model, std::size_t hidden) {
  return {linear(name + ".expand", d_model, hidden), linear(name + ".contract", hidden, d_model)};
}

EncoderLayerParams ParamFactory::encoder_layer(const std::string& name, std::size_t d_model, std::size_t hidden) {
  EncoderLayerParams p;
  p.attention = attention(name + ".attention", d_model);
  p.norm1 = norm(name + ".norm1", d_model);
  p.feedforward = feedforward(name + ".feedforward", d_model, hidden);
  p.norm2 = norm(name + ".norm2", d_model);
  return p;
}

DecoderLayerParams ParamFactory::decoder_layer(const std::string& name, std::size_t d_model, std::size_t hidden) {
  DecoderLayerParams p;
  p.self_attention = attention(name + ".self_attention", d_model);
  p.norm1 = norm(name + ".norm1", d_model);
  p.cross_attention = attention(name + ".cross_attention", d_model);
  p.norm2 = norm(name + ".norm2", d_model);
  p.feedforward = feedforward(name + ".feedforward", d_model, hidden);
  p.norm3 = norm(name + ".norm3", d_model);
  return p;
}

Tensor Context::drop(const Tensor& x) const {
  if (!train || dropout == 0.0) return x;
  if (rng == nullptr) throw ContractError("training-mode dropout needs a random source");
  return ad::dropout(tape, x, dropout, *rng, true);
}

Tensor linear(Tape& tape, const Tensor& x, const Linear& p) {
  return ad::add_bias(tape, ad::matmul(tape, x, p.weight), p.bias);
}

Tensor norm(Tape& tape, const Tensor& x, const Norm& p, double eps) {
  return ad::layer_norm(tape, x, p.gain, p.shift, eps);
}

Tensor condense_leads(Tape& tape, const Tensor& x, const CondenseParams& p) {
  const std::size_t leads = p.kernel.dim(2);
  if (x.rank() != 2 || x.dim(0) != leads) {
    throw ShapeError("condense_leads: expected " + std::to_string(leads) + "×L input, got " +
                     ad::shape_str(x.shape()));
  }
  const std::size_t length = x.dim(1);
  const Tensor map = ad::reshape(tape, x, {1, leads, length});
  const Tensor condensed = ad::conv2d(tape, map, p.kernel, p.bias);  // 1×1×L
  return linear(tape, ad::reshape(tape, condensed, {length, 1}), p.token);
}

Tensor positional_encoding(std::size_t length, std::size_t width) {
  std::vector<double> table(length * width);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t j = 0; j < width; ++j) {
      const double exponent = static_cast<double>(j - j % 2) / static_cast<double>(width);
      const double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
      table[pos * width + j] = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor({length, width}, std::move(table));
}

Tensor positional_encode(Tape& tape, const Tensor& tokens) {
  if (tokens.rank() != 2) throw ShapeError("positional_encode: expected a matrix, got " + ad::shape_str(tokens.shape()));
  return ad::add(tape, tokens, positional_encoding(tokens.dim(0), tokens.dim(1)));
}

Tensor multi_head_attention(Tape& tape, const Tensor& q, const Tensor& k, const Tensor& v,
                            const AttentionParams& p, std::size_t heads, std::vector<Tensor>* weights) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || k.shape() != v.shape() || q.dim(1) != k.dim(1)) {
    throw ShapeError("multi_head_attention: incompatible q " + ad::shape_str(q.shape()) + ", k " +
                     ad::shape_str(k.shape()) + ", v " + ad::shape_str(v.shape()));
  }
  const std::size_t d = q.dim(1);
  if (heads == 0 || d % heads != 0) {
    throw ShapeError("multi_head_attention: width " + std::to_string(d) + " not divisible by " +
                     std::to_string(heads) + " heads");
  }
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Tensor qp = linear(tape, q, p.query);
  const Tensor kp = linear(tape, k, p.key);
  const Tensor vp = linear(tape, v, p.value);
  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor qh = heads == 1 ? qp : ad::slice_cols(tape, qp, h * dh, dh);
    const Tensor kh = heads == 1 ? kp : ad::slice_cols(tape, kp, h * dh, dh);
    const Tensor vh = heads == 1 ? vp : ad::slice_cols(tape, vp, h * dh, dh);
    const Tensor attn = ad::softmax_rows(tape, ad::matmul_bt(tape, qh, kh, scale));
    if (weights) weights->push_back(attn);
    outputs.push_back(ad::matmul(tape, attn, vh));
  }
  const Tensor joined = heads == 1 ? outputs.front() : ad::concat_cols(tape, outputs);
  return linear(tape, joined, p.output);
}

Tensor feedforward(const Context& ctx, const Tensor& x, const FeedForwardParams& p) {
  return linear(ctx.tape, ad::relu(ctx.tape, linear(ctx.tape, x, p.expand)), p.contract);
}

Tensor encoder_layer(const Context& ctx, const Tensor& x, const EncoderLayerParams& p, std::size_t heads,
                     double eps, std::vector<Tensor>* weights) {
  Tape& tape = ctx.tape;
  const Tensor attn = ctx.drop(multi_head_attention(tape, x, x, x, p.attention, heads, weights));
  const Tensor h = norm(tape, ad::add(tape, x, attn), p.norm1, eps);
  const Tensor ff = ctx.drop(feedforward(ctx, h, p.feedforward));
  return norm(tape, ad::add(tape, h, ff), p.norm2, eps);
}

Tensor encoder_forward(const Context& ctx, const Tensor& x, const std::vector<EncoderLayerParams>& layers,
                       std::size_t heads, double eps, std::vector<std::vector<Tensor>>* weights) {
  Tensor h = x;
  for (const auto& layer : layers) {
    std::vector<Tensor>* sink = nullptr;
    if (weights) sink = &weights->emplace_back();
    h = encoder_layer(ctx, h, layer, heads, eps, sink);
  }
  return h;
}

Tensor notes_adapt(Tape& tape, const Tensor& notes, const Linear& p, std::size_t seq_len) {
  const std::size_t in = p.weight.dim(0);
  if (notes.size() != in) {
    throw ShapeError("notes_adapt: expected a " + std::to_string(in) + "-dim embedding, got " +
                     ad::shape_str(notes.shape()));
  }
  const Tensor row = linear(tape, ad::reshape(tape, notes, {1, in}), p);
  return ad::broadcast_rows(tape, row, seq_len);
}

Tensor decoder_forward(const Context& ctx, const Tensor& enc_out, const Tensor& notes_block,
                       const std::vector<DecoderLayerParams>& layers, std::size_t heads, double eps,
                       DecoderWeights* weights) {
  if (enc_out.shape() != notes_block.shape()) {
    throw ShapeError("decoder_forward: encoder output " + ad::shape_str(enc_out.shape()) +
                     " and notes block " + ad::shape_str(notes_block.shape()) + " differ");
  }
  Tape& tape = ctx.tape;
  Tensor out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& p = layers[i];
    const Tensor stream = i == 0 ? notes_block : ad::add(tape, out, notes_block);
    std::vector<Tensor>* self_sink = weights ? &weights->self_attention.emplace_back() : nullptr;
    std::vector<Tensor>* cross_sink = weights ? &weights->cross_attention.emplace_back() : nullptr;
    const Tensor self = ctx.drop(multi_head_attention(tape, stream, stream, stream, p.self_attention, heads, self_sink));
    const Tensor a = norm(tape, ad::add(tape, stream, self), p.norm1, eps);
    const Tensor cross = ctx.drop(multi_head_attention(tape, a, enc_out, enc_out, p.cross_attention, heads, cross_sink));
    const Tensor c = norm(tape, ad::add(tape, a, cross), p.norm2, eps);
    const Tensor ff = ctx.drop(feedforward(ctx, c, p.feedforward));
    out = norm(tape, ad::add(tape, c, ff), p.norm3, eps);
  }
  return out;
}

Tensor residual_merge(Tape& tape, const Tensor& raw, const Tensor& dec_out, const Linear& merge,
                      const Norm& merge_norm, double eps) {
  if (raw.rank() != 2 || dec_out.rank() != 2 || raw.dim(1) != dec_out.dim(0)) {
    throw ShapeError("residual_merge: raw input " + ad::shape_str(raw.shape()) + " does not match decoder output " +
                     ad::shape_str(dec_out.shape()));
  }
  const Tensor lifted = linear(tape, ad::transpose(tape, raw), merge);
  return norm(tape, ad::add(tape, lifted, dec_out), merge_norm, eps);
}

Tensor classifier_logits(const Context& ctx, const Tensor& x, const ClassifierParams& p,
                         std::vector<Tensor>* stages) {
  Tape& tape = ctx.tape;
  if (x.rank() != 2) throw ShapeError("classifier: expected a matrix, got " + ad::shape_str(x.shape()));
  Tensor h = ad::reshape(tape, x, {1, x.dim(0), x.dim(1)});
  for (std::size_t i = 0; i < 3; ++i) {
    h = ad::conv2d(tape, h, p.conv_kernels[i], p.conv_bias[i], 1, 1);
    h = ad::max_pool2d(tape, ad::relu(tape, h), 2);
    if (stages) stages->push_back(h);
  }
  h = ad::reshape(tape, h, {1, h.size()});
  for (std::size_t i = 0; i < 3; ++i) {
    h = linear(tape, h, p.dense[i]);
    if (i < 2) h = ctx.drop(ad::relu(tape, h));
    if (stages) stages->push_back(h);
  }
  return h;
}

Tensor classifier_forward(const Context& ctx, const Tensor& x, const ClassifierParams& p) {
  const Tensor logits = classifier_logits(ctx, x, p);
  return ad::reshape(ctx.tape, ad::sigmoid(ctx.tape, logits), {logits.size()});
}

}  // namespace mvmt::model
