#pragma once

#include <stdexcept>
#include <string>

namespace ecodec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A gene id that does not resolve in the registry it was looked up in.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A population could not be founded because the habitat's gene-pool is empty.
/// Kept distinct so a habitat can report the request as unfulfillable.
class NoGenesAvailable : public Error {
 public:
  NoGenesAvailable() : Error("no genes available") {}
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Bad scenario or snapshot input. The message names the offending path.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (dangling references, broken invariants).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ecodec
