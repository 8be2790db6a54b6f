#pragma once

#include <stdexcept>
#include <string>

namespace mhd {

// Bad input: grid size, parameter range, config keys, preset names.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or a loss of positivity during integration.
class BlowupError : public std::runtime_error {
public:
  BlowupError(const std::string& what, double t)
      : std::runtime_error(what + " at t=" + std::to_string(t)), time_(t) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

class CflError : public std::runtime_error {
public:
  CflError(const std::string& what, double t)
      : std::runtime_error(what + " at t=" + std::to_string(t)), time_(t) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace mhd
