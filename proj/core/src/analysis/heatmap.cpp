// SPDX-License-Identifier: Apache-2.0
#include "mvmt/analysis/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mvmt/error.hpp"

namespace mvmt::analysis {
namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("failed writing " + path.string());
}

}  // namespace

ad::Tensor pool_heads(const std::vector<ad::Tensor>& heads) {
  if (heads.empty()) throw ContractError("pool_heads: no attention heads");
  const ad::Shape shape = heads.front().shape();
  std::vector<double> acc(heads.front().size(), 0.0);
  for (const auto& h : heads) {
    if (h.shape() != shape) throw ShapeError("pool_heads: head shapes differ");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += h[i];
  }
  const double n = static_cast<double>(heads.size());
  for (auto& v : acc) v /= n;
  return ad::Tensor(shape, std::move(acc));
}

HeatmapMatrix heatmap_from_attention(const ad::Tensor& ecg, const ad::Tensor& pooled) {
  if (ecg.rank() != 2 || pooled.rank() != 2 || pooled.dim(0) != pooled.dim(1) || pooled.dim(1) != ecg.dim(1)) {
    throw ShapeError("heatmap: input " + ad::shape_str(ecg.shape()) + " does not match attention " +
                     ad::shape_str(pooled.shape()));
  }
  HeatmapMatrix h;
  h.rows = ecg.dim(0);
  h.cols = ecg.dim(1);
  h.values.assign(h.rows * h.cols, 0.0);
  const auto x = ecg.data();
  const auto p = pooled.data();
  for (std::size_t r = 0; r < h.rows; ++r) {
    for (std::size_t i = 0; i < h.cols; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < h.cols; ++j) acc += x[r * h.cols + j] * p[i * h.cols + j];
      h.values[r * h.cols + i] = acc;
    }
  }
  return h;
}

HeatmapMatrix attention_heatmap(const model::Mvmtnet& model, const ad::Tensor& ecg, const ad::Tensor& notes,
                                std::size_t layer_index, std::string record_id) {
  model::ForwardTrace trace;
  model.predict(ecg, notes, &trace);
  const std::vector<ad::Tensor>* heads = nullptr;
  if (model.config().per_lead_encoders) {
    if (layer_index != 0) throw ContractError("per-lead models expose a single multi-variate attention layer");
    heads = &trace.multivariate_attention;
  } else {
    if (layer_index >= trace.encoder_attention.size()) {
      throw ContractError("layer index " + std::to_string(layer_index) + " out of range (model has " +
                          std::to_string(trace.encoder_attention.size()) + " encoder layers)");
    }
    heads = &trace.encoder_attention[layer_index];
  }
  HeatmapMatrix h = heatmap_from_attention(ecg, pool_heads(*heads));
  h.record_id = std::move(record_id);
  h.layer_index = layer_index;
  return h;
}

std::string heatmap_csv(const HeatmapMatrix& h) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < h.rows; ++r) {
    for (std::size_t c = 0; c < h.cols; ++c) {
      std::snprintf(buf, sizeof(buf), c ? ",%.6f" : "%.6f", h.at(r, c));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string heatmap_pgm(const HeatmapMatrix& h) {
  std::string out = "P5\n" + std::to_string(h.cols) + " " + std::to_string(h.rows) + "\n255\n";
  for (std::size_t r = 0; r < h.rows; ++r) {
    const auto first = h.values.begin() + static_cast<std::ptrdiff_t>(r * h.cols);
    const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(h.cols));
    const double range = *hi - *lo;
    for (std::size_t c = 0; c < h.cols; ++c) {
      unsigned char level = 128;
      if (range > 0.0) level = static_cast<unsigned char>(std::lround(255.0 * (h.at(r, c) - *lo) / range));
      out += static_cast<char>(level);
    }
  }
  return out;
}

void export_heatmap(const HeatmapMatrix& h, const std::filesystem::path& stem) {
  if (h.values.size() != h.rows * h.cols || h.values.empty()) throw ContractError("export_heatmap: malformed matrix");
  for (double v : h.values) {
    if (!std::isfinite(v)) throw DomainError("export_heatmap: non-finite value");
  }
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path pgm = stem;
  pgm += ".pgm";
  write_bytes(csv, heatmap_csv(h));
  write_bytes(pgm, heatmap_pgm(h));
}

}  // namespace mvmt::analysis
