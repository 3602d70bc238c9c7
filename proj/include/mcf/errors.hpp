#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. a non-negative time for
/// an ancient solution).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// h + h'' dropped below the convexity threshold.
class ConvexityLost : public Error {
 public:
  using Error::Error;
};

/// A time step exceeded the stability bound or produced a non-convex stage.
class StepRejected : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class InsufficientProfile : public Error {
 public:
  using Error::Error;
};

class OutOfSweep : public Error {
 public:
  using Error::Error;
};

class StencilFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

class NotSlabLike : public Error {
 public:
  using Error::Error;
};

/// Slab classification could not decide between Entire and Slab.
class Inconclusive : public Error {
 public:
  using Error::Error;
};

}  // namespace mcf
