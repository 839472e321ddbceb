#pragma once

#include <stdexcept>
#include <string>

namespace graysl {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can map categories onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (PGM/FRF headers, truncated payloads, manifests).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value outside the domain an operation accepts.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Co-indexed rasters with different shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or spec parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate input to a fit (collinear, coplanar, empty).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Assembly requested before enough groups have arrived.
class WarmupError : public Error {
 public:
  using Error::Error;
};

}  // namespace graysl
