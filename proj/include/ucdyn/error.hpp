#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ucdyn {

enum class ErrorKind {
  ZeroVector,
  DimensionMismatch,
  DegenerateTail,
  KTooLarge,
  NeedTwoCreators,
  FileFormat,
  CountMismatch,
  Parse,
  Validation,
  OracleViolation,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Returns a copy whose message is prefixed with `context` (e.g. "step 12, user 3").
  Error with_context(const std::string& context) const {
    Error e = *this;
    static_cast<std::runtime_error&>(e) = std::runtime_error(context + ": " + what());
    return e;
  }

 private:
  ErrorKind kind_;
};

}  // namespace ucdyn
