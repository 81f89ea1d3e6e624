#include "loewner/errors.hpp"

namespace loewner {

const char* to_string(NumericalFailure kind) {
  switch (kind) {
    case NumericalFailure::StepLimitExceeded: return "StepLimitExceeded";
    case NumericalFailure::NonFiniteState: return "NonFiniteState";
    case NumericalFailure::NoHitWithinBudget: return "NoHitWithinBudget";
    case NumericalFailure::BracketFailure: return "BracketFailure";
  }
  return "NumericalFailure";
}

}  // namespace loewner
