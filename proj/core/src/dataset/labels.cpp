// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/labels.hpp"

#include <algorithm>
#include <vector>

#include "mvmt/error.hpp"

namespace mvmt::data {

std::optional<Superclass> parse_superclass(std::string_view code) {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (kClassCodes[i] == code) return static_cast<Superclass>(i);
  }
  return std::nullopt;
}

LabelVector LabelVector::from_mask(std::uint8_t mask) {
  LabelVector v;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (mask & (1u << i)) v.set(i);
  }
  return v;
}

std::size_t LabelVector::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint8_t LabelVector::mask() const {
  std::uint8_t m = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (bits_[i]) m = static_cast<std::uint8_t>(m | (1u << i));
  }
  return m;
}

std::array<double, kNumClasses> LabelVector::as_doubles() const {
  std::array<double, kNumClasses> out{};
  for (std::size_t i = 0; i < kNumClasses; ++i) out[i] = bits_[i] ? 1.0 : 0.0;
  return out;
}

std::string LabelVector::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!bits_[i]) continue;
    if (!out.empty()) out += ';';
    out += kClassCodes[i];
  }
  return out;
}

LabelVector multi_hot(std::span<const std::string_view> codes) {
  if (codes.empty()) throw CurationError("label set is empty");
  LabelVector v;
  for (auto code : codes) {
    const auto cls = parse_superclass(code);
    if (!cls) throw ParseError("unknown class code '" + std::string(code) + "'");
    v.set(*cls);
  }
  return v;
}

LabelVector parse_labels(std::string_view field) {
  std::vector<std::string_view> codes;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto end = std::min(field.find(';', start), field.size());
    auto code = field.substr(start, end - start);
    while (!code.empty() && code.front() == ' ') code.remove_prefix(1);
    while (!code.empty() && code.back() == ' ') code.remove_suffix(1);
    if (!code.empty()) codes.push_back(code);
    start = end + 1;
  }
  return multi_hot(codes);
}

}  // namespace mvmt::data
