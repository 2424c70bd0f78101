#pragma once

#include <stdexcept>
#include <string>

namespace consparse {

enum class ErrorKind {
  NonFiniteValue,
  TapeMismatch,
  InvalidNoise,
  InvalidGateConstants,
  ShapeError,
  InvalidDeformation,
  EmptyDataset,
  ConvergenceError,
  NonFiniteGradient,
  TooFewPoints,
  UnknownDataset,
  MissingColumn,
  NonNumeric,
  NonMonotoneStrain,
  SamplingError,
  CorruptCheckpoint,
  InvalidArgument,
  IoError,
  ParseError,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);
  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace consparse
