#pragma once

#include <stdexcept>
#include <string>

namespace fdmq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed chip description or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InfeasiblePlan : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Qubit exactly on resonance with its resonator; g^2/detuning is undefined.
class DegenerateDetuning : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NyquistViolation : public Error {
 public:
  using Error::Error;
};

class HeterodyneUnsupported : public Error {
 public:
  using Error::Error;
};

class StepSizeRejected : public Error {
 public:
  using Error::Error;
};

class UnknownDevice : public Error {
 public:
  using Error::Error;
};

class ConfigHashMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace fdmq
