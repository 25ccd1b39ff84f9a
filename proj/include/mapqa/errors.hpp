#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mapqa {

enum class ErrorKind {
  ParseError,
  InvariantError,
  UnknownRegion,
  DegenerateData,
  EmptyLexicon,
  EmptySplitScaleSet,
  OutOfRange,
  MismatchedClassification,
  NoValidSlotFilling,
  NoMatch,
  AmbiguousMatch,
  AmbiguousColor,
  InvalidQuery,
  UnparseableQuestion,
  UnknownSlot,
  NoLegendTokens,
  IndexOutOfRange,
  LengthMismatch,
  DuplicatePrediction,
  UnknownQuestion,
  EmptyPartitionCell,
  MissingOcrFile,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; kind() is the
// machine-readable category surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mapqa
