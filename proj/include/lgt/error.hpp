#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgt {

enum class ErrorCode {
  ParseError,
  FileNotFound,
  IoError,
  DuplicateNode,
  UnknownNode,
  DanglingEdge,
  NotATree,
  NonMinimal,
  BadCorrelation,
  InconsistentCovariance,
  RatioOutOfRange,
  IllConditioned,
  MissingAssignment,
  TooManyHidden,
  MismatchedNodeSets,
  NotLeafOnly,
  WrongShape,
  CapExceeded,
  MixtureTooLarge,
  InvalidArgument,
  UnknownCommand,
};

std::string_view to_string(ErrorCode code);

// Every library error carries the owning module so the CLI can surface it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

  // Precondition / input problems (CLI exit 1) as opposed to runtime failures
  // (CLI exit 2).
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace lgt
