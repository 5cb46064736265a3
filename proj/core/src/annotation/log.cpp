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

#include <sstream>

#include <fmt/format.h>

#include "medico/annotation/annotation.h"
#include "medico/error.h"
#include "medico/store/ntriples.h"

namespace medico::annotation {
namespace {
constexpr std::string_view kCommit = "# commit";
}  // namespace

AnnotationLog::AnnotationLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::kIo, "cannot open annotation log " + path_.string());
}

void AnnotationLog::Append(const std::vector<Triple>& batch) {
  std::string text = SerializeTriples(batch);
  text += kCommit;
  text += '\n';
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "write failed: " + path_.string());
}

void AnnotationLog::Truncate() {
  out_.close();
  out_.open(path_, std::ios::binary | std::ios::trunc);
  out_.close();
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::kIo, "cannot reopen annotation log " + path_.string());
}

std::vector<std::vector<Triple>> AnnotationLog::Replay(
    const std::filesystem::path& path) {
  std::vector<std::vector<Triple>> batches;
  if (!std::filesystem::exists(path)) return batches;
  std::istringstream in(ReadFile(path));

  std::vector<std::pair<std::size_t, std::string>> pending;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    // Only whole lines count; a partial last line is part of an uncommitted
    // batch anyway.
    if (in.eof()) break;
    if (line == kCommit) {
      std::vector<Triple> batch;
      for (const auto& [n, text] : pending) {
        try {
          for (Triple& t : ParseTriples(text)) batch.push_back(std::move(t));
        } catch (const ParseError& e) {
          throw ParseError(n, e.position(), path.string() + ": " + e.reason());
        }
      }
      batches.push_back(std::move(batch));
      pending.clear();
    } else {
      pending.emplace_back(number, line);
    }
  }
  return batches;
}

std::size_t AnnotationLog::ReplayInto(const std::filesystem::path& path, Store& store) {
  auto batches = Replay(path);
  for (const auto& batch : batches) {
    for (const Triple& t : batch) store.Insert(t);
  }
  return batches.size();
}

}  // namespace medico::annotation
