#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mating {

// Base of every error thrown by the library. Callers that only need a
// message can catch this; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidDenominator : public InvalidArgument {
 public:
  InvalidDenominator() : InvalidArgument("angle denominator must be positive") {}
};

class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnknownElement : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class GroundMismatch : public InvalidArgument {
 public:
  GroundMismatch() : InvalidArgument("partitions live on different ground sets") {}
};

class UnsupportedParameter : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A parameter angle 0 has no limb: it is the centre of the main cardioid.
class MainCardioid : public InvalidArgument {
 public:
  MainCardioid() : InvalidArgument("angle 0 lies in the main cardioid and has no limb") {}
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ValidationError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A map that does not respect a partition. The witness is a pair of
// elements in one class whose images land in different classes.
class InvarianceViolation : public Error {
 public:
  InvarianceViolation(std::size_t x, std::size_t y)
      : Error("map does not respect the partition: " + std::to_string(x) + " ~ " + std::to_string(y) +
              " but their images are in different classes"),
        witness_(x, y) {}

  const std::pair<std::size_t, std::size_t>& witness() const { return witness_; }

 private:
  std::pair<std::size_t, std::size_t> witness_;
};

// Raised for inputs outside the domain of a numerical map (a point inside the
// filled Julia set handed to the Boettcher coordinate, z = 0 for mu, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateMap : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace mating
