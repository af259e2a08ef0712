// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mvmt::data {

/// Diagnostic superclasses in slot order.
enum class Superclass : std::uint8_t { norm = 0, mi = 1, sttc = 2, cd = 3, hyp = 4 };

inline constexpr std::size_t kNumClasses = 5;
inline constexpr std::array<std::string_view, kNumClasses> kClassCodes{"NORM", "MI", "STTC", "CD", "HYP"};

std::optional<Superclass> parse_superclass(std::string_view code);

/// Multi-hot vector over [NORM, MI, STTC, CD, HYP].
class LabelVector {
 public:
  LabelVector() = default;
  static LabelVector from_mask(std::uint8_t mask);

  bool test(std::size_t slot) const { return bits_.at(slot) != 0; }
  void set(std::size_t slot) { bits_.at(slot) = 1; }
  void set(Superclass c) { set(static_cast<std::size_t>(c)); }
  std::size_t count() const;
  bool any() const { return count() > 0; }

  /// Bit i set iff slot i set; nonempty subsets are 1..31.
  std::uint8_t mask() const;
  std::array<double, kNumClasses> as_doubles() const;
  /// `;`-joined class codes in slot order, e.g. "MI;CD".
  std::string to_string() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::array<std::uint8_t, kNumClasses> bits_{};
};

/// Unknown code → ParseError naming it; empty set → CurationError.
LabelVector multi_hot(std::span<const std::string_view> codes);
/// Parses a `;`-separated label field.
LabelVector parse_labels(std::string_view field);

}  // namespace mvmt::data
