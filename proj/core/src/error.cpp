#include "edctr/error.hpp"

namespace edctr {

std::string_view to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::InvalidGeometry: return "invalid-geometry";
    case ErrorCategory::OutOfField: return "out-of-field";
    case ErrorCategory::UnderPopulation: return "under-population";
    case ErrorCategory::DeadCluster: return "dead-cluster";
    case ErrorCategory::SingularFormula: return "singular-formula";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::MissingCell: return "missing-cell";
    case ErrorCategory::SimulationComplete: return "simulation-complete";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Config: return 3;
    case ErrorCategory::Io: return 4;
    case ErrorCategory::MissingCell: return 5;
    case ErrorCategory::InvalidGeometry:
    case ErrorCategory::OutOfField: return 6;
    case ErrorCategory::UnderPopulation:
    case ErrorCategory::DeadCluster: return 7;
    case ErrorCategory::SingularFormula: return 8;
    case ErrorCategory::SimulationComplete: return 9;
  }
  return 1;
}

}  // namespace edctr
