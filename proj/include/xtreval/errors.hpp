#pragma once

#include <stdexcept>
#include <string>

namespace xtreval {

/// Base class for all xtreval errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed inputs, schema mismatches, invalid grids, misaligned axes
/// (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Order-of-operations violations in the pipeline, e.g. remapping season
/// maxima or fitting maxima extracted before regridding (CLI exit code 4).
class ProvenanceError : public Error {
 public:
  using Error::Error;
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kData = 3;
inline constexpr int kProvenance = 4;
inline constexpr int kConvergenceWarning = 5;
}  // namespace exit_code

}  // namespace xtreval
