#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pivotforge {

// Error classes. The CLI maps each one to a fixed exit status (see README).
enum class ErrorKind {
  kParse,            // malformed input file or document
  kInvalidArgument,  // precondition or invariant violation
  kIo,               // filesystem failures
  kProvider,         // TTS provider failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ParseError(const std::string& message) {
  return Error(ErrorKind::kParse, message);
}
inline Error InvalidArgument(const std::string& message) {
  return Error(ErrorKind::kInvalidArgument, message);
}
inline Error IoError(const std::string& message) {
  return Error(ErrorKind::kIo, message);
}

// Exit status used by the command-line tool for an error class.
inline int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
      return 2;
    case ErrorKind::kInvalidArgument:
      return 3;
    case ErrorKind::kIo:
      return 4;
    case ErrorKind::kProvider:
      return 5;
  }
  return 1;
}

}  // namespace pivotforge
