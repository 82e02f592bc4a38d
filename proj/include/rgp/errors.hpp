#pragma once

#include <stdexcept>
#include <string>

namespace rgp {

// Base class for every computation error raised by the library. Usage errors
// (bad flags, malformed files) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A log map or transport was requested between points on each other's cut locus.
class CutLocusError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

// Covariance estimation collapsed (e.g. all residuals zero).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

class NonUnitError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgp
