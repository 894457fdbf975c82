#pragma once

#include <stdexcept>
#include <string>

namespace actrack {

/// Invalid configuration or file content; maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem/stream failure; maps to CLI exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace actrack
