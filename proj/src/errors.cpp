#include "hypertoric/errors.hpp"

namespace hypertoric {

const char* to_string(Error::Kind kind) noexcept {
  using K = Error::Kind;
  switch (kind) {
    case K::NotSurjective: return "NotSurjective";
    case K::RankDeficient: return "RankDeficient";
    case K::NonGenericStability: return "NonGenericStability";
    case K::DimensionMismatch: return "DimensionMismatch";
    case K::NotSmooth: return "NotSmooth";
    case K::BudgetExceeded: return "BudgetExceeded";
    case K::NotZeroDimensional: return "NotZeroDimensional";
    case K::ParameterDegeneracy: return "ParameterDegeneracy";
    case K::InconsistentExtraction: return "InconsistentExtraction";
    case K::PoleOrderError: return "PoleOrderError";
    case K::SingularEvaluation: return "SingularEvaluation";
    case K::StepFailure: return "StepFailure";
    case K::DegenerateModel: return "DegenerateModel";
    case K::UnsupportedDimension: return "UnsupportedDimension";
    case K::BranchTrackingFailure: return "BranchTrackingFailure";
    case K::QuadratureFailure: return "QuadratureFailure";
    case K::IncompleteCriticalSet: return "IncompleteCriticalSet";
    case K::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case K::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

} // namespace hypertoric
