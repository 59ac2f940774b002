#pragma once

#include <stdexcept>
#include <string>

namespace stepreward {

/// Bad configs, unreadable files, malformed records. CLI exit code 1.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// NaN/Inf reaching an output file, or a diverged computation. CLI exit code 2.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace stepreward
