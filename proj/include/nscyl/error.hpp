#pragma once

#include <stdexcept>
#include <string>

namespace nscyl {

// Mirrors the status codes of the C API (see nscyl.h).
enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  io = 3,
  numerical = 4,
  check_failed = 5,
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

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace nscyl
