// SPDX-License-Identifier: Apache-2.0
#include "mvmt/analysis/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mvmt/error.hpp"
#include "mvmt/training/history.hpp"

namespace mvmt::analysis {

Similarity cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine_similarity: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0), false};
}

std::vector<Similarity> head_pool_similarity(const std::vector<std::vector<double>>& heads,
                                             std::span<const double> pooled) {
  std::vector<Similarity> out;
  out.reserve(heads.size());
  for (const auto& h : heads) out.push_back(cosine_similarity(h, pooled));
  return out;
}

void export_history(const std::vector<train::EpochStats>& history, const std::filesystem::path& stem) {
  if (history.empty()) throw ContractError("export_history: empty history");
  std::filesystem::path csv = stem;
  csv += ".csv";
  train::write_history_csv(csv, history);

  struct Curve {
    const char* name;
    double train::EpochStats::*field;
  };
  const Curve curves[] = {{"train_loss", &train::EpochStats::train_loss},
                          {"val_loss", &train::EpochStats::val_loss},
                          {"train_error", &train::EpochStats::train_error},
                          {"val_error", &train::EpochStats::val_error}};
  char buf[96];
  for (const auto& curve : curves) {
    std::filesystem::path dat = stem;
    dat += std::string("_") + curve.name + ".dat";
    std::ofstream file(dat, std::ios::binary);
    if (!file) throw IoError("cannot write " + dat.string());
    file << "# epoch " << curve.name << "\n";
    for (const auto& s : history) {
      std::snprintf(buf, sizeof(buf), "%zu %.6f\n", s.epoch, s.*(curve.field));
      file << buf;
    }
    if (!file) throw IoError("failed writing " + dat.string());
  }
}

}  // namespace mvmt::analysis
