#include "mrpods/error.hpp"

namespace mrpods {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TruncatedStream: return "TruncatedStream";
    case ErrorCode::InvalidTable: return "InvalidTable";
    case ErrorCode::InputTooLarge: return "InputTooLarge";
    case ErrorCode::CorruptContainer: return "CorruptContainer";
    case ErrorCode::RatioUnrealizable: return "RatioUnrealizable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UncorrectableCodeword: return "UncorrectableCodeword";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MixedPayloads: return "MixedPayloads";
    case ErrorCode::HeaderConflict: return "HeaderConflict";
    case ErrorCode::BadHeaderCrc: return "BadHeaderCrc";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::DpiTooLow: return "DpiTooLow";
    case ErrorCode::GridNotFound: return "GridNotFound";
    case ErrorCode::ExcessiveSkew: return "ExcessiveSkew";
    case ErrorCode::YearOutOfRange: return "YearOutOfRange";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace mrpods
