#ifndef WCS_ERROR_HPP
#define WCS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wcs {

// Mirrors wcs_status in wcs.h; values are part of the C ABI.
enum class ErrorCode : int {
  InvalidArgument = 1,
  DimensionMismatch = 2,
  CapExceeded = 3,
  Infeasible = 4,
  NotConverged = 5,
  Io = 6,
  Parse = 7,
  Precondition = 8,
  Schema = 9,
  Internal = 99,
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

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace wcs

#endif  // WCS_ERROR_HPP
