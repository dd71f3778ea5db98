#pragma once

#include <stdexcept>
#include <string>

namespace hdlss {

/// Base for every error raised by the library. Callers that want to record a
/// failure (rather than abort) catch this type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files, unparseable cells, bad configuration values.
class InputError : public Error {
public:
  using Error::Error;
};

/// A method cannot be fitted on the data it was given (p >= h for MCD,
/// singular pooled covariance, too few rows after trimming, ...).
class FitError : public Error {
public:
  using Error::Error;
};

} // namespace hdlss
