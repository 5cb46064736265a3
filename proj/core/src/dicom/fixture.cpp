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
#include <chrono>
#include <string>

#include <fmt/format.h>

#include "medico/dicom/dicom.h"
#include "medico/error.h"

namespace medico::dicom {
namespace {

constexpr std::string_view kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";
constexpr std::string_view kImplementationClass = "1.2.826.0.1.3680043.9.7433.1";

[[noreturn]] void Invalid(std::string_view keyword, std::string_view value,
                          std::string_view why) {
  throw Error(ErrorCode::kValidation,
              fmt::format("{} value \"{}\" is invalid: {}", keyword, value, why));
}

void CheckUid(std::string_view keyword, std::string_view uid) {
  if (uid.size() > 64) Invalid(keyword, uid, "UID longer than 64 characters");
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = uid.find('.', start);
    std::string_view part = uid.substr(start, dot - start);
    if (part.empty()) Invalid(keyword, uid, "empty UID component");
    if (!std::all_of(part.begin(), part.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
      Invalid(keyword, uid, "UID components must be digits");
    }
    if (part.size() > 1 && part[0] == '0') {
      Invalid(keyword, uid, "UID component with leading zero");
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
}

void CheckDate(std::string_view keyword, std::string_view da) {
  if (da.size() != 8 ||
      !std::all_of(da.begin(), da.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    Invalid(keyword, da, "dates are YYYYMMDD");
  }
  int y = std::stoi(std::string(da.substr(0, 4)));
  unsigned m = static_cast<unsigned>(std::stoi(std::string(da.substr(4, 2))));
  unsigned d = static_cast<unsigned>(std::stoi(std::string(da.substr(6, 2))));
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (!ymd.ok()) Invalid(keyword, da, "no such calendar date");
}

// Checks shared by every text VR we write. Values must survive the trailing
// padding strip on the way back in, and we only claim plain ASCII.
void CheckText(std::string_view keyword, std::string_view value) {
  for (char c : value) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u >= 0x7F) Invalid(keyword, value, "non-printable or non-ASCII byte");
    if (c == '\\') Invalid(keyword, value, "backslash is the multi-value delimiter");
  }
  if (value.front() == ' ' || value.back() == ' ') {
    Invalid(keyword, value, "leading or trailing space");
  }
}

void Validate(const KeywordInfo& info, std::string_view value) {
  if (info.vr == "UI") {
    CheckUid(info.keyword, value);
    return;
  }
  CheckText(info.keyword, value);
  if (info.vr == "DA") {
    CheckDate(info.keyword, value);
  } else if (info.vr == "CS") {
    if (value.size() > 16) Invalid(info.keyword, value, "CS longer than 16 characters");
    for (char c : value) {
      if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == ' ' || c == '_')) {
        Invalid(info.keyword, value, "CS allows A-Z, 0-9, space and underscore");
      }
    }
  } else if (info.vr == "LO") {
    if (value.size() > 64) Invalid(info.keyword, value, "LO longer than 64 characters");
  } else if (info.vr == "PN") {
    // Up to three component groups separated by '=', 64 characters each.
    std::size_t groups = 1, run = 0;
    for (char c : value) {
      if (c == '=') {
        ++groups;
        run = 0;
      } else if (++run > 64) {
        Invalid(info.keyword, value, "PN component group longer than 64 characters");
      }
    }
    if (groups > 3) Invalid(info.keyword, value, "PN has at most three component groups");
  }
}

void Put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void Put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

bool IsLongVr(std::string_view vr) {
  return vr == "OB" || vr == "OW" || vr == "SQ" || vr == "UN" || vr == "UT";
}

std::vector<std::uint8_t> EncodeElement(Tag tag, std::string_view vr,
                                        std::vector<std::uint8_t> value,
                                        bool undefined_length = false) {
  std::vector<std::uint8_t> out;
  Put16(out, tag.group);
  Put16(out, tag.element);
  out.push_back(static_cast<std::uint8_t>(vr[0]));
  out.push_back(static_cast<std::uint8_t>(vr[1]));
  if (IsLongVr(vr)) {
    Put16(out, 0);
    Put32(out, undefined_length ? 0xFFFFFFFF : static_cast<std::uint32_t>(value.size()));
  } else {
    Put16(out, static_cast<std::uint16_t>(value.size()));
  }
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

std::vector<std::uint8_t> EncodeText(Tag tag, std::string_view vr,
                                     std::string_view text) {
  std::vector<std::uint8_t> value(text.begin(), text.end());
  if (value.size() % 2 != 0) value.push_back(vr == "UI" ? '\0' : ' ');
  return EncodeElement(tag, vr, std::move(value));
}

void Append(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& more) {
  out.insert(out.end(), more.begin(), more.end());
}

std::vector<std::uint8_t> ReferencedImageSequence(bool undefined_length,
                                                  std::string_view sop_uid) {
  std::vector<std::uint8_t> item;
  Append(item, EncodeText({0x0008, 0x1150}, "UI", kCtImageStorage));
  Append(item, EncodeText({0x0008, 0x1155}, "UI", sop_uid));

  std::vector<std::uint8_t> body;
  Put16(body, 0xFFFE);
  Put16(body, 0xE000);
  if (undefined_length) {
    Put32(body, 0xFFFFFFFF);
    Append(body, item);
    Put16(body, 0xFFFE);
    Put16(body, 0xE00D);
    Put32(body, 0);
    Put16(body, 0xFFFE);
    Put16(body, 0xE0DD);
    Put32(body, 0);
  } else {
    Put32(body, static_cast<std::uint32_t>(item.size()));
    Append(body, item);
  }
  return EncodeElement({0x0008, 0x1140}, "SQ", std::move(body), undefined_length);
}

}  // namespace

std::span<const KeywordInfo> ExtractedKeywords() {
  static constexpr std::array<KeywordInfo, 9> kKeywords = {{
      {"PatientID", {0x0010, 0x0020}, "LO"},
      {"PatientName", {0x0010, 0x0010}, "PN"},
      {"StudyInstanceUID", {0x0020, 0x000D}, "UI"},
      {"SeriesInstanceUID", {0x0020, 0x000E}, "UI"},
      {"SOPInstanceUID", {0x0008, 0x0018}, "UI"},
      {"Modality", {0x0008, 0x0060}, "CS"},
      {"StudyDate", {0x0008, 0x0020}, "DA"},
      {"SeriesDescription", {0x0008, 0x103E}, "LO"},
      {"BodyPartExamined", {0x0018, 0x0015}, "CS"},
  }};
  return kKeywords;
}

std::vector<std::uint8_t> WriteFixture(const Metadata& metadata,
                                       const FixtureOptions& options) {
  auto keywords = ExtractedKeywords();
  std::vector<std::pair<Tag, std::vector<std::uint8_t>>> body;
  std::string sop_uid = "1.2.3";
  for (const auto& [keyword, value] : metadata) {
    auto it = std::find_if(keywords.begin(), keywords.end(),
                           [&](const KeywordInfo& k) { return k.keyword == keyword; });
    if (it == keywords.end()) {
      throw Error(ErrorCode::kValidation, "unknown keyword " + keyword);
    }
    if (value.empty()) continue;
    Validate(*it, value);
    if (keyword == "SOPInstanceUID") sop_uid = value;
    body.emplace_back(it->tag, EncodeText(it->tag, it->vr, value));
  }
  CheckUid("TransferSyntaxUID", options.transfer_syntax);
  if (options.include_sequence) {
    body.emplace_back(Tag{0x0008, 0x1140},
                      ReferencedImageSequence(options.undefined_length_sequence, sop_uid));
  }
  if (options.include_pixel_data) {
    body.emplace_back(kPixelData,
                      EncodeElement(kPixelData, "OW", std::vector<std::uint8_t>(32, 0)));
  }
  std::sort(body.begin(), body.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::uint8_t> meta;
  Append(meta, EncodeElement({0x0002, 0x0001}, "OB", {0x00, 0x01}));
  Append(meta, EncodeText({0x0002, 0x0002}, "UI", kCtImageStorage));
  Append(meta, EncodeText({0x0002, 0x0003}, "UI", sop_uid));
  Append(meta, EncodeText(kTransferSyntaxUid, "UI", options.transfer_syntax));
  Append(meta, EncodeText({0x0002, 0x0012}, "UI", kImplementationClass));

  std::vector<std::uint8_t> out(128, 0);
  for (char c : std::string_view("DICM")) out.push_back(static_cast<std::uint8_t>(c));
  std::vector<std::uint8_t> group_length;
  Put32(group_length, static_cast<std::uint32_t>(meta.size()));
  Append(out, EncodeElement({0x0002, 0x0000}, "UL", std::move(group_length)));
  Append(out, meta);
  for (const auto& [tag, bytes] : body) Append(out, bytes);
  return out;
}

}  // namespace medico::dicom
