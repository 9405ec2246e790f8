#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kex {

/// Bad input data: unreadable files, malformed records, corrupted priors.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller misuse: invalid arguments or missing configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receives non-fatal diagnostics (missing key files, lossy decoding, ...).
using WarningHandler = std::function<void(std::string_view)>;

/// Writes "warning: <msg>" to stderr.
WarningHandler stderr_warnings();

}  // namespace kex
