#include "mapqa/errors.hpp"

namespace mapqa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantError: return "InvariantError";
    case ErrorKind::UnknownRegion: return "UnknownRegion";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::EmptyLexicon: return "EmptyLexicon";
    case ErrorKind::EmptySplitScaleSet: return "EmptySplitScaleSet";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::MismatchedClassification: return "MismatchedClassification";
    case ErrorKind::NoValidSlotFilling: return "NoValidSlotFilling";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::AmbiguousColor: return "AmbiguousColor";
    case ErrorKind::InvalidQuery: return "InvalidQuery";
    case ErrorKind::UnparseableQuestion: return "UnparseableQuestion";
    case ErrorKind::UnknownSlot: return "UnknownSlot";
    case ErrorKind::NoLegendTokens: return "NoLegendTokens";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorKind::UnknownQuestion: return "UnknownQuestion";
    case ErrorKind::EmptyPartitionCell: return "EmptyPartitionCell";
    case ErrorKind::MissingOcrFile: return "MissingOcrFile";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace mapqa
