// SPDX-License-Identifier: Apache-2.0

#include "mcad/error.hpp"

namespace mcad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::ServiceUnavailable: return "ServiceUnavailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::SingleClassData: return "SingleClassData";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::SinkUnavailable: return "SinkUnavailable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {
std::string format(ErrorCode code, const std::string& what) {
  return std::string(to_string(code)) + ": " + what;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(format(code, what)), code_(code) {}

Error::Error(ErrorCode code, std::size_t line, const std::string& what)
    : std::runtime_error(format(code, "line " + std::to_string(line) + ": " + what)),
      code_(code),
      line_(line) {}

}  // namespace mcad
