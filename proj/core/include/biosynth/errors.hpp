#ifndef BIOSYNTH_ERRORS_HPP
#define BIOSYNTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace biosynth {

/// Invalid or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failure while generating or analyzing a signal (CLI exit code 2).
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system / serialization failure (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace biosynth

#endif
