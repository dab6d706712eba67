#pragma once

#include <stdexcept>
#include <string>

namespace hypermcf {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad dimensions, signs or option values supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a scalar function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A discrete step produced a spacelike or null vector; the time step is too large.
class ChartError : public Error {
 public:
  ChartError() : Error("left hyperboloid chart") {}
  explicit ChartError(const std::string& what) : Error("left hyperboloid chart: " + what) {}
};

/// The mean curvature vanishes, so the adapted normal frame is undefined.
class DegenerateFrameError : public Error {
 public:
  DegenerateFrameError() : Error("mean-curvature-degenerate") {}
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested pinched set is empty.
class SamplerError : public Error {
 public:
  using Error::Error;
};

/// Discrete profile lost the ordering or conditioning the stencils need.
class RemeshError : public Error {
 public:
  using Error::Error;
};

/// A monitored invariant failed during a run.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace hypermcf
