#pragma once
/* Typed error taxonomy.  Domain errors describe legitimate mathematical
 * refusals (non-Morse data, blocked segments, ...) and map to CLI exit
 * code 2; usage errors (parse/io) map to exit code 1. */

#include <stdexcept>
#include <string>

namespace fsforge {

enum class ErrorCode {
  non_morse,
  degenerate_values,
  root_finding_failed,
  value_on_ray,
  value_at_origin,
  angle_tie,
  interior_critical_value,
  inconclusive,
  drift_exceeded,
  step_failure,
  non_positive_bracket,
  ill_conditioned,
  angular_resolution,
  endpoint_tangency,
  no_convergence,
  diverged_field,
  shape_mismatch,
  directedness_violation,
  relation_failure,
  multiple_crossings,
  count_undefined,
  precondition,
  parse_error,
  io_error,
  invalid_argument,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::non_morse: return "NonMorse";
    case ErrorCode::degenerate_values: return "DegenerateValues";
    case ErrorCode::root_finding_failed: return "RootFindingFailed";
    case ErrorCode::value_on_ray: return "ValueOnRay";
    case ErrorCode::value_at_origin: return "ValueAtOrigin";
    case ErrorCode::angle_tie: return "AngleTie";
    case ErrorCode::interior_critical_value: return "InteriorCriticalValue";
    case ErrorCode::inconclusive: return "Inconclusive";
    case ErrorCode::drift_exceeded: return "DriftExceeded";
    case ErrorCode::step_failure: return "StepFailure";
    case ErrorCode::non_positive_bracket: return "NonPositiveBracket";
    case ErrorCode::ill_conditioned: return "IllConditioned";
    case ErrorCode::angular_resolution: return "AngularResolutionExceeded";
    case ErrorCode::endpoint_tangency: return "EndpointTangency";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::diverged_field: return "DivergedField";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::directedness_violation: return "DirectednessViolation";
    case ErrorCode::relation_failure: return "RelationFailure";
    case ErrorCode::multiple_crossings: return "MultipleCrossings";
    case ErrorCode::count_undefined: return "CountUndefined";
    case ErrorCode::precondition: return "PreconditionViolated";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const { return code_; }
  /* true => mathematical refusal, CLI exit 2; false => usage, exit 1 */
  bool domain() const {
    return code_ != ErrorCode::parse_error && code_ != ErrorCode::io_error &&
           code_ != ErrorCode::invalid_argument;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
  throw Error(c, msg);
}

}  // namespace fsforge
