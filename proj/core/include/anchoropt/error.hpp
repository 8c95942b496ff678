#pragma once

#include <stdexcept>
#include <string>

namespace anchoropt {

// Error conditions surfaced by the library. The CLI maps these to
// machine-parseable one-line messages.
enum class errc {
  zero_norm_row,
  dim_mismatch,
  k_too_large,
  non_finite_cost,
  numerical_overflow,
  seed_exceeds_total,
  non_finite_loss,
  non_finite_gradient,
  empty_seed,
  anchor_count_mismatch,
  missing_key,
  empty_sets,
  degenerate_data,
  missing_class,
  length_mismatch,
  parse_error,
  dim_inconsistent,
  duplicate_key,
  empty_intersection,
  not_enough_keys,
  version_mismatch,
  corrupt_artifact,
  invalid_argument,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::zero_norm_row: return "ZeroNormRow";
    case errc::dim_mismatch: return "DimMismatch";
    case errc::k_too_large: return "KTooLarge";
    case errc::non_finite_cost: return "NonFiniteCost";
    case errc::numerical_overflow: return "NumericalOverflow";
    case errc::seed_exceeds_total: return "SeedExceedsTotal";
    case errc::non_finite_loss: return "NonFiniteLoss";
    case errc::non_finite_gradient: return "NonFiniteGradient";
    case errc::empty_seed: return "EmptySeed";
    case errc::anchor_count_mismatch: return "AnchorCountMismatch";
    case errc::missing_key: return "MissingKey";
    case errc::empty_sets: return "EmptySets";
    case errc::degenerate_data: return "DegenerateData";
    case errc::missing_class: return "MissingClass";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::parse_error: return "ParseError";
    case errc::dim_inconsistent: return "DimInconsistent";
    case errc::duplicate_key: return "DuplicateKey";
    case errc::empty_intersection: return "EmptyIntersection";
    case errc::not_enough_keys: return "NotEnoughKeys";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::corrupt_artifact: return "CorruptArtifact";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace anchoropt
