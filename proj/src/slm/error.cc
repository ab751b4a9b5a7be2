#include "slm/error.h"

#include <atomic>
#include <iostream>

namespace slm {

namespace {
std::atomic<bool> g_warnings_enabled{true};
}

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kVocabularyMismatch: return "vocabulary mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kSearchFailure: return "search failure";
    case ErrorCode::kInvalidDerivation: return "invalid derivation";
    case ErrorCode::kIllegalAction: return "illegal action";
    case ErrorCode::kZeroProbability: return "zero probability";
    case ErrorCode::kMissingReference: return "missing reference";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

void Warn(const std::string& message) {
  if (g_warnings_enabled.load()) std::cerr << "WARNING: " << message << '\n';
}

void SetWarningsEnabled(bool enabled) { g_warnings_enabled.store(enabled); }

}  // namespace slm
