#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqlreward {

/// Base class of every error raised by the library.  `code()` is the stable
/// machine-readable name used on the wire.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Malformed SQL. Carries the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("ParseError", message + " at offset " + std::to_string(position)),
        position_(position),
        detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

class DbNotFound : public Error {
 public:
  explicit DbNotFound(const std::string& path)
      : Error("DbNotFound", "database not found: " + path) {}
};

class GoldExecutionFailed : public Error {
 public:
  explicit GoldExecutionFailed(const std::string& message)
      : Error("GoldExecutionFailed", "gold SQL failed to execute: " + message) {}
};

class ProviderUnavailable : public Error {
 public:
  explicit ProviderUnavailable(const std::string& message)
      : Error("ProviderUnavailable", message) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("DimensionMismatch", "expected dimension " + std::to_string(expected) +
                                       ", got " + std::to_string(actual)) {}
};

class EmptyRetrieval : public Error {
 public:
  EmptyRetrieval() : Error("EmptyRetrieval", "no admissible memory entries") {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("DomainError", message) {}
};

class TooFewTraces : public Error {
 public:
  explicit TooFewTraces(std::size_t count)
      : Error("TooFewTraces", "self-BLEU needs at least 2 traces, got " + std::to_string(count)) {}
};

class PoolMissing : public Error {
 public:
  explicit PoolMissing(const std::string& key)
      : Error("PoolMissing", "no reference pool for key: " + key) {}
};

/// Bad input data (unreadable file, malformed JSON row, invalid argument).
class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error("DataError", message) {}
};

}  // namespace sqlreward
