#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace stieltjes {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Error classification used across the library. Names double as the
/// machine-parseable codes emitted by the CLI.
enum class errc {
  // parameter validation
  non_positive_length,
  lengths_do_not_sum_to_one,
  index_out_of_range,
  contraction_violated,
  too_few_pieces,
  size_mismatch,
  // pointwise evaluation
  non_convergent_evaluation,
  // discrete systems and eigensolvers
  empty_measure,
  degenerate_gap,
  branch_empty,
  no_convergence,
  // identity checks
  mismatch_beyond_tolerance,
  not_stabilized,
  singular_c,
  singular_block,
  precondition_violated,
  // asymptotic extraction
  period_degenerate,
  too_few_eigenvalues,
  branch_absent,
  // front end
  invalid_config,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_length:       return "NonPositiveLength";
    case errc::lengths_do_not_sum_to_one: return "LengthsDoNotSumToOne";
    case errc::index_out_of_range:        return "IndexOutOfRange";
    case errc::contraction_violated:      return "ContractionViolated";
    case errc::too_few_pieces:            return "TooFewPieces";
    case errc::size_mismatch:             return "SizeMismatch";
    case errc::non_convergent_evaluation: return "NonConvergentEvaluation";
    case errc::empty_measure:             return "EmptyMeasure";
    case errc::degenerate_gap:            return "DegenerateGap";
    case errc::branch_empty:              return "BranchEmpty";
    case errc::no_convergence:            return "NoConvergence";
    case errc::mismatch_beyond_tolerance: return "MismatchBeyondTolerance";
    case errc::not_stabilized:            return "NotStabilized";
    case errc::singular_c:                return "SingularC";
    case errc::singular_block:            return "SingularBlock";
    case errc::precondition_violated:     return "PreconditionViolated";
    case errc::period_degenerate:         return "PeriodDegenerate";
    case errc::too_few_eigenvalues:       return "TooFewEigenvalues";
    case errc::branch_absent:             return "BranchAbsent";
    case errc::invalid_config:            return "InvalidConfig";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

}  // namespace stieltjes
