#pragma once

#include <stdexcept>
#include <string>

namespace fw {

// Validation failures (bad config, violated preconditions). Maps to CLI exit
// code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what, std::string json_pointer = {})
      : std::runtime_error(what), pointer_(std::move(json_pointer)) {}

  const std::string& json_pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// A trajectory left the sane region (|coordinate| > divergence guard) or
// produced a non-finite state. Maps to CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t)
      : std::runtime_error(what), time_(t) {}

  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace fw
