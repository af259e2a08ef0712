// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/history.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "mvmt/dataset/manifest.hpp"
#include "mvmt/error.hpp"

namespace mvmt::train {
namespace {

double field(const std::string& text, const std::string& origin, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError(origin + ": line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_history(const std::vector<EpochStats>& history) {
  std::string out = std::string(kHistoryHeader) + "\n";
  char buf[160];
  for (const auto& s : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f\n", s.epoch, s.train_loss, s.val_loss, s.train_error,
                  s.val_error);
    out += buf;
  }
  return out;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochStats>& history) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  file << format_history(history);
  if (!file) throw IoError("failed writing " + path.string());
}

std::vector<EpochStats> read_history_csv(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  const std::string origin = path.string();
  std::string line;
  if (!std::getline(file, line) || line != kHistoryHeader) throw ParseError(origin + ": missing history header");
  std::vector<EpochStats> out;
  for (std::size_t n = 2; std::getline(file, line); ++n) {
    if (line.empty()) continue;
    const auto cells = data::split_csv_line(line);
    if (cells.size() != 5) throw ParseError(origin + ": line " + std::to_string(n) + ": expected 5 fields");
    EpochStats s;
    s.epoch = static_cast<std::size_t>(field(cells[0], origin, n));
    s.train_loss = field(cells[1], origin, n);
    s.val_loss = field(cells[2], origin, n);
    s.train_error = field(cells[3], origin, n);
    s.val_error = field(cells[4], origin, n);
    out.push_back(s);
  }
  return out;
}

}  // namespace mvmt::train
