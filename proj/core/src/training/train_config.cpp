// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/train_config.hpp"

#include <charconv>
#include <cmath>

#include "mvmt/error.hpp"
#include "mvmt/model/config.hpp"

namespace mvmt::train {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError(std::string(key) + " must be finite");
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  if (early_stop_patience == 0) throw ConfigError("early_stop_patience must be at least 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must be in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
}

bool TrainConfig::set(std::string_view key, std::string_view value) {
  if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
  else if (key == "batch_size") batch_size = parse_number<std::size_t>(key, value);
  else if (key == "max_epochs") max_epochs = parse_number<std::size_t>(key, value);
  else if (key == "early_stop_patience") early_stop_patience = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "adam_beta1") adam_beta1 = parse_number<double>(key, value);
  else if (key == "adam_beta2") adam_beta2 = parse_number<double>(key, value);
  else if (key == "adam_eps") adam_eps = parse_number<double>(key, value);
  else if (key == "eval_train_split") {
    if (value == "true" || value == "1") eval_train_split = true;
    else if (value == "false" || value == "0") eval_train_split = false;
    else throw ConfigError("invalid boolean for eval_train_split: '" + std::string(value) + "'");
  } else {
    return false;
  }
  return true;
}

std::vector<std::pair<std::string, std::string>> TrainConfig::to_kv() const {
  using model::format_double;
  return {
      {"learning_rate", format_double(learning_rate)},
      {"batch_size", std::to_string(batch_size)},
      {"max_epochs", std::to_string(max_epochs)},
      {"early_stop_patience", std::to_string(early_stop_patience)},
      {"seed", std::to_string(seed)},
      {"adam_beta1", format_double(adam_beta1)},
      {"adam_beta2", format_double(adam_beta2)},
      {"adam_eps", format_double(adam_eps)},
      {"eval_train_split", eval_train_split ? "true" : "false"},
  };
}

}  // namespace mvmt::train
