#pragma once

#include <stdexcept>
#include <string>

namespace tbg {

/// Problem with the requested configuration (bad point, bad parameters,
/// unusable metric) as opposed to a failed numerical check.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tbg
