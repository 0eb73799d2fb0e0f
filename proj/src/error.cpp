#include "lgt/error.hpp"

namespace lgt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::NonMinimal: return "NonMinimal";
    case ErrorCode::BadCorrelation: return "BadCorrelation";
    case ErrorCode::InconsistentCovariance: return "InconsistentCovariance";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::MissingAssignment: return "MissingAssignment";
    case ErrorCode::TooManyHidden: return "TooManyHidden";
    case ErrorCode::MismatchedNodeSets: return "MismatchedNodeSets";
    case ErrorCode::NotLeafOnly: return "NotLeafOnly";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::MixtureTooLarge: return "MixtureTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(code)) + ": " + message),
      code_(code),
      module_(std::move(module)) {}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::IoError:
    case ErrorCode::IllConditioned:
      return false;
    default:
      return true;
  }
}

}  // namespace lgt
