#pragma once

#include <stdexcept>

namespace rocap {

// Malformed or inconsistent input: wrong sizes, unknown ids, schema
// violations. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of the numerics themselves: degenerate geometry, singular
// systems. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class CountMismatch : public DataError {
 public:
  using DataError::DataError;
};

class TooFewStations : public DataError {
 public:
  using DataError::DataError;
};

class TooFewPairs : public DataError {
 public:
  using DataError::DataError;
};

class UnknownRecordId : public DataError {
 public:
  using DataError::DataError;
};

class EmptyPredictionSet : public DataError {
 public:
  using DataError::DataError;
};

class EmptyState : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class InvalidStep : public DataError {
 public:
  using DataError::DataError;
};

class InvalidRange : public DataError {
 public:
  using DataError::DataError;
};

class EmptyPlan : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

class CalibrationMissing : public DataError {
 public:
  using DataError::DataError;
};

class PlanChainMismatch : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateMotion : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularNormalEquations : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCorners : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BehindCameraError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rocap
