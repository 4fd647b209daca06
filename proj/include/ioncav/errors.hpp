#pragma once

#include <stdexcept>
#include <string>

namespace ioncav {

// Base class for every library error; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operator/state used with a space it was not built on, or a builder given a
// space of the wrong shape.
class SignatureError : public Error {
 public:
  using Error::Error;
};

// A structural contract broke: Hermiticity out of tolerance, norm drift, ...
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Requested state/evolution does not fit the truncated space.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// A physics precondition (validity inequality, resonance condition,
// required phase/detuning) is violated; message names the inequality.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// Time step too large for the propagator's accuracy guard.
class StepGuardError : public Error {
 public:
  using Error::Error;
};

// Configuration file / CLI input problem; message names key and constraint.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioncav
