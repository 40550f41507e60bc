#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncguard {

enum class Errc {
  InvalidArgument,
  ZeroInverse,
  ModulusMismatch,
  DimMismatch,
  Singular,
  Inconsistent,
  IndexOutOfRange,
  GenerationMismatch,
  ParameterGenFailure,
  DecryptionFailure,
  DegenerateSpace,
  SingularPaddingSystem,
  SubsetTooSmall,
  MissingCommitment,
  ConfigError,
  UnknownFixture,
};

std::string_view to_string(Errc code);

/// All library failures are reported through this type; `code()` identifies
/// the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ncguard
