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

#ifndef MEDICO_ERROR_H_
#define MEDICO_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace medico {

enum class ErrorCode {
  kParse,
  kUnsupported,
  kNotFound,
  kValidation,
  kConflict,
  kIo,
  kFormat,
  kTruncated,
  kIngestReject,
  kPrecondition,
  kEmptyQuery,
  kUnknownTimePhrase,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (CLI, HTTP layer, dialogue manager) can map it without parsing
// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse failure at a known location. `line` is 1-based (0 when the input is
// not line oriented); `position` is a byte offset (0-based) within the line
// or the whole text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t position, const std::string& reason);

  std::size_t line() const { return line_; }
  std::size_t position() const { return position_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t position_;
  std::string reason_;
};

// Raised for SPARQL constructs outside the supported subset.
class UnsupportedFeatureError : public Error {
 public:
  explicit UnsupportedFeatureError(const std::string& keyword)
      : Error(ErrorCode::kUnsupported, "unsupported feature: " + keyword),
        keyword_(keyword) {}

  const std::string& keyword() const { return keyword_; }

 private:
  std::string keyword_;
};

}  // namespace medico

#endif  // MEDICO_ERROR_H_
