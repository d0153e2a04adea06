// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcad {

enum class ErrorCode {
  ChannelMismatch,
  NonFiniteValue,
  InvalidTimestamp,
  SchemaError,
  ParseError,
  InvalidScenario,
  ServiceUnavailable,
  DimensionMismatch,
  Timeout,
  ShapeMismatch,
  InvalidLabel,
  EmptyBatch,
  SingleClassData,
  NonFiniteLoss,
  SinkUnavailable,
  LengthMismatch,
  UnknownVersion,
  CorruptCheckpoint,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library is an Error carrying a typed code.
// ParseError additionally carries the 1-based source line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  Error(ErrorCode code, std::size_t line, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace mcad
