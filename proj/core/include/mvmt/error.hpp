// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mvmt {

/// Base of every error raised by the library. The category drives the CLI
/// exit status (see tools/cli).
class Error : public std::runtime_error {
 public:
  enum class Category { usage, data, numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

// Programming/contract violations: bad shapes, bad arguments.
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(Category::usage, w) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(Category::usage, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(Category::usage, w) {}
};

// Problems with input data or files.
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Category::data, w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(Category::data, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(Category::data, w) {}
};
struct CurationError : Error {
  explicit CurationError(const std::string& w) : Error(Category::data, w) {}
};

// Non-finite values where finite ones are required.
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(Category::numerical, w) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& w) : Error(Category::numerical, w) {}
};

}  // namespace mvmt
