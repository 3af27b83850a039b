#include "nlslab/error.hpp"

#include <sstream>

namespace nlslab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NoNegativeEigenvalue: return "NoNegativeEigenvalue";
    case ErrorCode::NonPositiveForm: return "NonPositiveForm";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::ResampleAliasing: return "ResampleAliasing";
    case ErrorCode::NotInBasin: return "NotInBasin";
    case ErrorCode::NewtonStalled: return "NewtonStalled";
    case ErrorCode::GridResample: return "GridResample";
    case ErrorCode::BasinLost: return "BasinLost";
    case ErrorCode::TooSparse: return "TooSparse";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

namespace {
std::string with_code(ErrorCode code, const std::string& detail) {
  return std::string(to_string(code)) + ": " + detail;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(with_code(code, detail)), code_(code) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& detail)
    : Error(ErrorCode::ParseError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + detail),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::string field, const std::string& detail)
    : Error(ErrorCode::ValidationError, field + ": " + detail), field_(std::move(field)) {}

BasinLost::BasinLost(std::size_t index, double time, const std::string& cause)
    : Error(ErrorCode::BasinLost,
            [&] {
              std::ostringstream os;
              os << "decomposition failed at snapshot " << index << " (t = " << time
                 << "): " << cause;
              return os.str();
            }()),
      index_(index),
      time_(time) {}

}  // namespace nlslab
