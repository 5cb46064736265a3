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

#include <algorithm>
#include <array>
#include <cstring>
#include <string>

#include <fmt/format.h>

#include "medico/dicom/dicom.h"
#include "medico/error.h"

namespace medico::dicom {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFF;
constexpr Tag kItem{0xFFFE, 0xE000};
constexpr Tag kItemEnd{0xFFFE, 0xE00D};
constexpr Tag kSequenceEnd{0xFFFE, 0xE0DD};
// Nesting deeper than this is treated as hostile input.
constexpr int kMaxNesting = 32;

bool IsLongVr(std::string_view vr) {
  static constexpr std::array<std::string_view, 13> kLong = {
      "OB", "OD", "OF", "OL", "OV", "OW", "SQ",
      "SV", "UC", "UN", "UR", "UT", "UV"};
  return std::find(kLong.begin(), kLong.end(), vr) != kLong.end();
}

bool IsStringVr(std::string_view vr) {
  static constexpr std::array<std::string_view, 17> kText = {
      "AE", "AS", "CS", "DA", "DS", "DT", "IS", "LO", "LT",
      "PN", "SH", "ST", "TM", "UC", "UI", "UR", "UT"};
  return std::find(kText.begin(), kText.end(), vr) != kText.end();
}

std::string DecodeText(const std::vector<std::uint8_t>& raw) {
  std::string text(raw.begin(), raw.end());
  while (!text.empty() && (text.back() == ' ' || text.back() == '\0')) {
    text.pop_back();
  }
  return text;
}

// Bounds-checked little-endian cursor. Every read goes through Need(), so a
// declared length can never move the cursor past the end of the buffer.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t pos) { pos_ = pos; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  Tag PeekTag() {
    Need(4, "tag");
    return Tag{Le16(pos_), Le16(pos_ + 2)};
  }

  // One explicit-VR element. Sequences are consumed and yield nullopt.
  std::optional<Element> ReadElement(int depth) {
    const std::size_t start = pos_;
    Need(8, "element header");
    Tag tag{Le16(pos_), Le16(pos_ + 2)};
    if (tag.group == 0xFFFE) {
      throw Error(ErrorCode::kFormat,
                  fmt::format("unexpected delimiter {} at offset {}",
                              tag.ToString(), start));
    }
    char c0 = static_cast<char>(bytes_[pos_ + 4]);
    char c1 = static_cast<char>(bytes_[pos_ + 5]);
    if (c0 < 'A' || c0 > 'Z' || c1 < 'A' || c1 > 'Z') {
      throw Error(ErrorCode::kFormat,
                  fmt::format("invalid VR for {} at offset {}",
                              tag.ToString(), start + 4));
    }
    std::string vr{c0, c1};
    std::uint32_t length;
    if (IsLongVr(vr)) {
      Need(12, "element header");
      length = Le32(pos_ + 8);
      pos_ += 12;
    } else {
      length = Le16(pos_ + 6);
      pos_ += 8;
    }

    if (length == kUndefinedLength) {
      if (vr != "SQ") {
        throw Error(ErrorCode::kUnsupported,
                    fmt::format("undefined length on {} element {} at offset {}",
                                vr, tag.ToString(), start));
      }
      SkipUndefinedSequence(depth + 1);
      return std::nullopt;
    }
    if (remaining() < length) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("truncated at offset {}: element {} declares {} "
                              "bytes, {} remain",
                              start, tag.ToString(), length, remaining()));
    }
    if (vr == "SQ") {
      pos_ += length;
      return std::nullopt;
    }

    Element element;
    element.tag = tag;
    element.vr = std::move(vr);
    element.length = length;
    element.raw.assign(bytes_.begin() + pos_, bytes_.begin() + pos_ + length);
    pos_ += length;
    if (IsStringVr(element.vr)) element.text = DecodeText(element.raw);
    return element;
  }

 private:
  void Need(std::size_t n, std::string_view what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("truncated at offset {}: {} needs {} bytes, {} "
                              "remain",
                              pos_, what, n, remaining()));
    }
  }

  std::uint16_t Le16(std::size_t at) const {
    return static_cast<std::uint16_t>(bytes_[at] | (bytes_[at + 1] << 8));
  }
  std::uint32_t Le32(std::size_t at) const {
    return static_cast<std::uint32_t>(bytes_[at]) |
           (static_cast<std::uint32_t>(bytes_[at + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes_[at + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes_[at + 3]) << 24);
  }

  // Item headers are always tag + 4-byte length, whatever the VR mode.
  std::pair<Tag, std::uint32_t> ReadItemHeader(std::string_view what) {
    Need(8, what);
    Tag tag{Le16(pos_), Le16(pos_ + 2)};
    std::uint32_t length = Le32(pos_ + 4);
    pos_ += 8;
    return {tag, length};
  }

  void SkipUndefinedSequence(int depth) {
    if (depth > kMaxNesting) {
      throw Error(ErrorCode::kFormat,
                  fmt::format("sequences nested too deeply at offset {}", pos_));
    }
    for (;;) {
      const std::size_t at = pos_;
      auto [tag, length] = ReadItemHeader("sequence item header");
      if (tag == kSequenceEnd) return;
      if (tag != kItem) {
        throw Error(ErrorCode::kFormat,
                    fmt::format("expected item tag at offset {}, found {}", at,
                                tag.ToString()));
      }
      if (length == kUndefinedLength) {
        SkipUndefinedItem(depth);
      } else {
        if (remaining() < length) {
          throw Error(ErrorCode::kTruncated,
                      fmt::format("truncated at offset {}: item declares {} "
                                  "bytes, {} remain",
                                  at, length, remaining()));
        }
        pos_ += length;
      }
    }
  }

  void SkipUndefinedItem(int depth) {
    for (;;) {
      if (PeekTag() == kItemEnd) {
        ReadItemHeader("item delimiter");
        return;
      }
      ReadElement(depth);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Tag::ToString() const {
  return fmt::format("({:04X},{:04X})", group, element);
}

const Element* Dataset::Find(Tag tag) const {
  for (const Element& e : elements) {
    if (e.tag == tag) return &e;
  }
  return nullptr;
}

Dataset ParseFile(std::span<const std::uint8_t> bytes,
                  std::filesystem::path source) {
  constexpr std::size_t kHeader = 132;
  if (bytes.size() < kHeader) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("truncated at offset {}: file has {} bytes, a "
                            "DICOM header needs at least {}",
                            bytes.size(), bytes.size(), kHeader));
  }
  if (std::memcmp(bytes.data() + 128, "DICM", 4) != 0) {
    throw Error(ErrorCode::kFormat, "missing DICM magic at offset 128");
  }

  Dataset dataset;
  dataset.source = std::move(source);
  Reader reader(bytes);
  reader.set_pos(kHeader);

  std::optional<Tag> previous;
  auto note_order = [&](Tag tag) {
    if (previous && tag < *previous) {
      dataset.warnings.push_back(
          fmt::format("tag {} follows {} (out of order)", tag.ToString(),
                      previous->ToString()));
    }
    previous = tag;
  };

  while (reader.remaining() > 0 && reader.PeekTag().group == 0x0002) {
    Tag tag = reader.PeekTag();
    note_order(tag);
    if (auto e = reader.ReadElement(0)) dataset.elements.push_back(std::move(*e));
  }

  const Element* ts = dataset.Find(kTransferSyntaxUid);
  if (ts == nullptr || !ts->text) {
    throw Error(ErrorCode::kFormat,
                "file meta group lacks Transfer Syntax UID (0002,0010)");
  }
  dataset.transfer_syntax = *ts->text;
  if (dataset.transfer_syntax != kExplicitVrLittleEndian) {
    throw Error(ErrorCode::kUnsupported,
                "unsupported transfer syntax " + dataset.transfer_syntax);
  }

  while (reader.remaining() > 0) {
    Tag tag = reader.PeekTag();
    if (tag == kPixelData) break;
    note_order(tag);
    if (auto e = reader.ReadElement(0)) dataset.elements.push_back(std::move(*e));
  }
  return dataset;
}

}  // namespace medico::dicom
