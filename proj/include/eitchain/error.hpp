#pragma once

#include <stdexcept>
#include <string>

namespace eit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class ZeroControlField : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class PulseOverlapsMedium : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownPreset : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class RootNotBracketed : public Error {
 public:
  using Error::Error;
};

class NonConverged : public Error {
 public:
  using Error::Error;
};

// Non-finite values or a large negative intensity. snapshot_path is filled in
// when the caller managed to dump the offending state.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what, double t = 0.0)
      : Error(what), time(t) {}
  double time;
  std::string snapshot_path;
};

class NegativeIntensity : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace eit
