#pragma once

#include <stdexcept>
#include <string>

namespace uqcpt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few observations for the requested operation (e.g. pairs need n >= 2).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its domain: window, lag, bandwidth, probability.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A density estimate used for studentization fell below the floor.
class SingularDensity : public Error {
 public:
  using Error::Error;
};

/// The sample has no spread, so a scale or variance estimate is zero.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

}  // namespace uqcpt
