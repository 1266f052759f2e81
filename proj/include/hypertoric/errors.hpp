#pragma once

#include <stdexcept>
#include <string>

namespace hypertoric {

/// Mathematical failure raised by any module. The CLI maps these to exit code 3.
class Error : public std::runtime_error {
public:
  enum class Kind {
    NotSurjective,
    RankDeficient,
    NonGenericStability,
    DimensionMismatch,
    NotSmooth,
    BudgetExceeded,
    NotZeroDimensional,
    ParameterDegeneracy,
    InconsistentExtraction,
    PoleOrderError,
    SingularEvaluation,
    StepFailure,
    DegenerateModel,
    UnsupportedDimension,
    BranchTrackingFailure,
    QuadratureFailure,
    IncompleteCriticalSet,
    SearchBudgetExceeded,
    InvalidArgument,
  };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

const char* to_string(Error::Kind kind) noexcept;

} // namespace hypertoric
