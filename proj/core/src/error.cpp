#include "hyperball/error.hpp"

namespace hyperball {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kDomain:
      return "domain";
    case ErrorCategory::kDimension:
      return "dimension";
    case ErrorCategory::kBoundary:
      return "boundary";
    case ErrorCategory::kConvergence:
      return "convergence";
    case ErrorCategory::kNumerical:
      return "numerical";
    case ErrorCategory::kCollapse:
      return "collapse";
  }
  return "unknown";
}

}  // namespace hyperball
