#pragma once

#include <stdexcept>
#include <string>

namespace blastomere {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad sigma, inverted thresholds, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Reading or writing a file failed, or a file was malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Geometry that cannot produce a result (parallel bisectors, collinear contour, ...).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

// No inner zona boundary could be estimated and no fallback was allowed.
class NoZonaFound : public Error {
 public:
  using Error::Error;
};

// No admissible template position or size exists.
class NoPlacement : public Error {
 public:
  using Error::Error;
};

// The synthetic generator could not place cells under the overlap constraint.
class PlacementFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace blastomere
