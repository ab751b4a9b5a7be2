#ifndef SLM_ERROR_H_
#define SLM_ERROR_H_

#include <stdexcept>
#include <string>

namespace slm {

// Mirrors slm_status in the public C header; values must stay in sync.
enum class ErrorCode {
  kOk = 0,
  kIo = 1,
  kFormat = 2,
  kVocabularyMismatch = 3,
  kInvalidArgument = 4,
  kSearchFailure = 5,
  kInvalidDerivation = 6,
  kIllegalAction = 7,
  kZeroProbability = 8,
  kMissingReference = 9,
  kInternal = 10,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse errors carry the character offset (or line number for files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t offset, const char* unit = "offset")
      : Error(ErrorCode::kFormat, what + " at " + unit + " " + std::to_string(offset)),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// Non-fatal diagnostics go to stderr unless silenced (tests silence them).
void Warn(const std::string& message);
void SetWarningsEnabled(bool enabled);

}  // namespace slm

#endif  // SLM_ERROR_H_
