#pragma once

#include <stdexcept>
#include <string>

namespace sbandit {

// Invalid scenario/instance input; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An agent whose copy counts sum to zero registers nothing.
struct EmptyStrategyError : ConfigError {
  using ConfigError::ConfigError;
};

struct InvalidMeanError : ConfigError {
  using ConfigError::ConfigError;
};

struct UnknownArmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// select/update protocol violation (e.g. update applied twice for one select).
struct StaleUpdateError : std::logic_error {
  using std::logic_error::logic_error;
};

// Exhaustive enumeration would exceed the path guard.
struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sbandit
