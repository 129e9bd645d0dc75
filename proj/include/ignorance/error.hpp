#pragma once

#include <stdexcept>
#include <string>

namespace ignorance {

enum class ErrorCode {
  InvalidArgument,
  Precondition,
  MissingSlot,
  NegativeProbability,
  LogSingularity,
  Unregistered,
  Duplicate,
  Sequence,
  Schema,
};

// All rejections raised by the library. The code lets callers (the CLI in
// particular) map failures to exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void reject(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ignorance
