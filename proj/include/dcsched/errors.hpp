#pragma once

#include <stdexcept>
#include <string>

namespace dcsched {

/// Bad user-supplied configuration: unparsable policy strings, unknown
/// config keys, inconsistent dimensions between configured inputs.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system problems: missing files, unreadable or malformed content.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The model itself was violated at runtime: CoP evaluated outside its
/// validity range, non-permutation placements, infeasible jobs.
class ModelError : public std::runtime_error {
  public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dcsched
