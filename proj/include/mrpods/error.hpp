#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrpods {

enum class ErrorCode {
  EmptyBlock,
  IndexOutOfRange,
  TruncatedStream,
  InvalidTable,
  InputTooLarge,
  CorruptContainer,
  RatioUnrealizable,
  LengthMismatch,
  UncorrectableCodeword,
  ConfigInvalid,
  MixedPayloads,
  HeaderConflict,
  BadHeaderCrc,
  UnknownVersion,
  DpiTooLow,
  GridNotFound,
  ExcessiveSkew,
  YearOutOfRange,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception; `code()` is the stable
// discriminator, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mrpods
