#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vaa {

enum class ErrorCode {
  InvalidArgument,
  InvalidAssignment,
  InvalidSize,
  Capacity,
  Dimension,
  DegenerateSpectrum,
  HistogramMode,
  FitFailure,
  InsufficientSamples,
  DegenerateSample,
  ModelViolation,
  InvalidReference,
  NotFound,
  UndefinedCorrelation,
  PredictionFailure,
  Budget,
  OutOfReach,
  UnsupportedKind,
  NotDiagonal,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidAssignment: return "invalid_assignment";
    case ErrorCode::InvalidSize: return "invalid_size";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::Dimension: return "dimension";
    case ErrorCode::DegenerateSpectrum: return "degenerate_spectrum";
    case ErrorCode::HistogramMode: return "histogram_mode";
    case ErrorCode::FitFailure: return "fit_failure";
    case ErrorCode::InsufficientSamples: return "insufficient_samples";
    case ErrorCode::DegenerateSample: return "degenerate_sample";
    case ErrorCode::ModelViolation: return "model_violation";
    case ErrorCode::InvalidReference: return "invalid_reference";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::UndefinedCorrelation: return "undefined_correlation";
    case ErrorCode::PredictionFailure: return "prediction_failure";
    case ErrorCode::Budget: return "budget";
    case ErrorCode::OutOfReach: return "out_of_reach";
    case ErrorCode::UnsupportedKind: return "unsupported_kind";
    case ErrorCode::NotDiagonal: return "not_diagonal";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Every domain failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vaa
