#include "advforge/error.hpp"

namespace advforge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kInvalidSpec: return "invalid network spec";
    case ErrorKind::kNumeric: return "non-finite value";
    case ErrorKind::kWrongMagic: return "wrong magic";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kCountMismatch: return "count mismatch";
    case ErrorKind::kVersionMismatch: return "version mismatch";
    case ErrorKind::kDigestMismatch: return "digest mismatch";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kConfig: return "config error";
  }
  return "unknown";
}

}  // namespace advforge
