/**
 * @file errors.hpp
 * @brief Error taxonomy for the knot series engine.
 *
 * Every failure mode that callers are expected to handle carries a stable
 * ErrorCode so the CLI can map it to a process exit status:
 *   validation-type errors -> exit 2, non-convergence -> exit 3,
 *   resource caps -> exit 4.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace fk {

/// Stable machine-readable failure categories.
enum class ErrorCode {
  Validation,            ///< malformed input, bad arguments, schema violations
  NonIntegralEvaluation, ///< an evaluation required a fractional exponent or
                         ///< non-exact division where exactness was promised
  TruncationLoss,        ///< a computation would silently drop terms inside
                         ///< the requested window
  UnsupportedRank,       ///< requested Lie rank outside the implemented range
  CapsMissing,           ///< a truncated method was invoked without the caps
                         ///< it needs (x and q orders)
  NoValidInversion,      ///< no arc-typing makes an inverted sum well defined
  NonConvergence,        ///< stratified accumulation failed to stabilise
  ResourceCap,           ///< configured enumeration/memory budget exhausted
  Internal,              ///< broken invariant: always a bug, never user error
};

/// Exception carrying an ErrorCode; all library errors derive from this.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Short stable identifier, e.g. "NonIntegralEvaluation".
  const char* code_name() const noexcept {
    switch (code_) {
      case ErrorCode::Validation: return "Validation";
      case ErrorCode::NonIntegralEvaluation: return "NonIntegralEvaluation";
      case ErrorCode::TruncationLoss: return "TruncationLoss";
      case ErrorCode::UnsupportedRank: return "UnsupportedRank";
      case ErrorCode::CapsMissing: return "CapsMissing";
      case ErrorCode::NoValidInversion: return "NoValidInversion";
      case ErrorCode::NonConvergence: return "NonConvergence";
      case ErrorCode::ResourceCap: return "ResourceCap";
      case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
  }

 private:
  ErrorCode code_;
};

/// Throw helper so call sites stay one-liners.
[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Internal-invariant check; active in all build types (exact math engine:
/// a broken invariant must never produce a silently wrong series).
inline void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::Internal, what);
}

}  // namespace fk
