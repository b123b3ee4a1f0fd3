#pragma once

#include <stdexcept>
#include <string>

namespace hybridctl {

enum class ErrorCode {
  kDomain,              // argument outside its mathematical domain
  kDegenerateVariance,  // a standard error evaluated to zero
  kBracket,             // root finder bracket without a sign change
  kNumericalFailure,    // solver did not converge or a monotonicity check failed
  kSingularSystem,      // logistic anchors with identical t-values
  kUsage,               // unsupported option, format, or malformed input
  kCancelled,           // progress callback requested a stop
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hybridctl
