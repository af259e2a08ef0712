// SPDX-License-Identifier: Apache-2.0
#include "mvmt/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mvmt/error.hpp"

namespace mvmt::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T number(std::string_view key, std::string_view v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

train::TrainConfig RunConfig::train_config() const {
  train::TrainConfig t = train;
  t.seed = seed;
  return t;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  if (model.set(key, value)) return;
  if (key == "seed") {
    seed = number<std::uint64_t>(key, value);
    return;
  }
  if (train.set(key, value)) return;
  if (key == "manifest") manifest = std::string(value);
  else if (key == "embeddings") embeddings = std::string(value);
  else if (key == "checkpoint") checkpoint = std::string(value);
  else if (key == "out") out = std::string(value);
  else if (key == "per_class_cap") per_class_cap = number<std::size_t>(key, value);
  else if (key == "split_train") split_train = number<double>(key, value);
  else if (key == "split_val") split_val = number<double>(key, value);
  else if (key == "split_test") split_test = number<double>(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  model.validate();
  train_config().validate();
  split_spec().validate();
  if (per_class_cap == 0) throw ConfigError("per_class_cap must be at least 1");
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "# model\n";
  for (const auto& [k, v] : model.to_kv()) out << k << " = " << v << "\n";
  out << "# training\nseed = " << seed << "\n";
  for (const auto& [k, v] : train.to_kv()) {
    if (k != "seed") out << k << " = " << v << "\n";
  }
  out << "# data\nper_class_cap = " << per_class_cap << "\n";
  out << "split_train = " << model::format_double(split_train) << "\n";
  out << "split_val = " << model::format_double(split_val) << "\n";
  out << "split_test = " << model::format_double(split_test) << "\n";
  return out.str();
}

void apply_config_text(RunConfig& config, std::string_view text, const std::string& origin) {
  std::size_t at = 0;
  for (std::size_t line_no = 1; at <= text.size(); ++line_no) {
    auto end = text.find('\n', at);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(at, end - at);
    at = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << file.rdbuf();
  apply_config_text(config, buf.str(), path.string());
}

}  // namespace mvmt::cli
