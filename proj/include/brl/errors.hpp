#pragma once

#include <stdexcept>
#include <string>

namespace brl {

// Bad data: malformed files, degenerate inputs, pool/dataset mismatches.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration: invalid flags, parameter ranges, precondition misuse.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace brl
