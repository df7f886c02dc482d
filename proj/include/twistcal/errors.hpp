#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistcal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rank deficiency, Gram-Schmidt breakdown, degenerate spans.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Linear system or matrix inverse requested on a (numerically) singular matrix.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Expression evaluated outside the domain of one of its operations.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

class ParseError : public Error {
 public:
  enum class Kind { syntax, unknown_identifier };

  ParseError(Kind kind, std::size_t offset, std::string message, std::vector<std::string> expected)
      : Error(message), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

  Kind kind() const noexcept { return kind_; }
  // Byte offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }
  // For syntax errors the acceptable tokens; for unknown identifiers the declared names.
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace twistcal
