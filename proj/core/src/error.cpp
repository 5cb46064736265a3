// Copyright 2026 The Medico Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "medico/error.h"

#include <fmt/format.h>

namespace medico {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kValidation: return "validation-error";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kFormat: return "format-error";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kIngestReject: return "ingestion-reject";
    case ErrorCode::kPrecondition: return "precondition-failed";
    case ErrorCode::kEmptyQuery: return "empty-query";
    case ErrorCode::kUnknownTimePhrase: return "unknown-time-phrase";
    case ErrorCode::kConfig: return "config-error";
  }
  return "unknown";
}

namespace {

std::string FormatParseMessage(std::size_t line, std::size_t position,
                               const std::string& reason) {
  if (line == 0) return fmt::format("at position {}: {}", position, reason);
  return fmt::format("line {}: {}", line, reason);
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t position,
                       const std::string& reason)
    : Error(ErrorCode::kParse, FormatParseMessage(line, position, reason)),
      line_(line),
      position_(position),
      reason_(reason) {}

}  // namespace medico
