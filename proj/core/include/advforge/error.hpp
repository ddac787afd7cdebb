#pragma once

#include <stdexcept>
#include <string>

namespace advforge {

/// Failure categories. Loaders and checkpoint readers use the specific kinds so
/// callers (and tests) can tell a wrong magic number from a truncated payload.
enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kInvalidSpec,
  kNumeric,
  kWrongMagic,
  kTruncated,
  kCountMismatch,
  kVersionMismatch,
  kDigestMismatch,
  kIo,
  kConfig,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace advforge
