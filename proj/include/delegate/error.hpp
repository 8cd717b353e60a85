#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delegate {

enum class ErrorCode {
  kInvalidArgument,
  kHazardAtSupportEnd,
  kQuadratureNonconvergent,
  kSearchTooLarge,
  kParse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every module in the library. The code lets
/// callers (the CLI in particular) distinguish usage problems from numerical
/// failures without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_invalid(const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) throw_invalid(what);
}

}  // namespace delegate
