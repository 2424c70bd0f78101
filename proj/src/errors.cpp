#include "consparse/errors.hpp"

namespace consparse {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::TapeMismatch: return "TapeMismatch";
    case ErrorKind::InvalidNoise: return "InvalidNoise";
    case ErrorKind::InvalidGateConstants: return "InvalidGateConstants";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::InvalidDeformation: return "InvalidDeformation";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::ConvergenceError: return "ConvergenceError";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::UnknownDataset: return "UnknownDataset";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::NonMonotoneStrain: return "NonMonotoneStrain";
    case ErrorKind::SamplingError: return "SamplingError";
    case ErrorKind::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      detail_(detail) {}

}  // namespace consparse
