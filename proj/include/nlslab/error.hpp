#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlslab {

enum class ErrorCode {
  NoBracket,
  ToleranceNotMet,
  QuadratureUnstable,
  GridTooCoarse,
  NoNegativeEigenvalue,
  NonPositiveForm,
  BoxTooSmall,
  TailTooLarge,
  ResampleAliasing,
  NotInBasin,
  NewtonStalled,
  GridResample,
  BasinLost,
  TooSparse,
  BlowupDetected,
  NonFinite,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code);

// Base class for every failure the library reports. The code identifies the
// failure mode; what() carries the human readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& detail);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& detail);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class BasinLost : public Error {
 public:
  BasinLost(std::size_t index, double time, const std::string& cause);
  std::size_t index() const noexcept { return index_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t index_;
  double time_;
};

}  // namespace nlslab
