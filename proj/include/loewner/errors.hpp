#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

enum class NumericalFailure {
  StepLimitExceeded,
  NonFiniteState,
  NoHitWithinBudget,
  BracketFailure,
};

const char* to_string(NumericalFailure kind);

// Raised when an integration or root search cannot produce a trustworthy
// answer. Bad inputs are reported with std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(NumericalFailure kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] NumericalFailure kind() const noexcept { return kind_; }

 private:
  NumericalFailure kind_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loewner
