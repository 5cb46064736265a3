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

#ifndef MEDICO_DICOM_DICOM_H_
#define MEDICO_DICOM_DICOM_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medico/store/triple_store.h"

namespace medico::dicom {

inline constexpr std::string_view kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";
inline constexpr std::string_view kImplicitVrLittleEndian = "1.2.840.10008.1.2";

struct Tag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  // "(GGGG,EEEE)", uppercase hex.
  std::string ToString() const;

  friend auto operator<=>(const Tag&, const Tag&) = default;
  friend bool operator==(const Tag&, const Tag&) = default;
};

inline constexpr Tag kPixelData{0x7FE0, 0x0010};
inline constexpr Tag kTransferSyntaxUid{0x0002, 0x0010};

struct Element {
  Tag tag;
  std::string vr;
  std::uint32_t length = 0;
  std::vector<std::uint8_t> raw;
  // String VRs only, with trailing space / NUL padding removed.
  std::optional<std::string> text;
};

struct Dataset {
  std::vector<Element> elements;  // file meta group first, in file order
  std::filesystem::path source;
  std::string transfer_syntax;
  // Non-fatal findings, e.g. out-of-order tags.
  std::vector<std::string> warnings;

  const Element* Find(Tag tag) const;
};

// Parses the header of a DICOM Part 10 file: 128-byte preamble, "DICM",
// explicit-VR little-endian file meta group, then the main dataset, which
// must use Explicit VR Little Endian. Parsing stops before Pixel Data;
// sequences are skipped, by declared length or by delimiter scan.
//
// Errors: Error(kTruncated) with the byte offset for input that ends inside
// an element (including files shorter than 132 bytes), Error(kFormat) for a
// missing magic or malformed structure, Error(kUnsupported) naming the UID
// of any other transfer syntax.
Dataset ParseFile(std::span<const std::uint8_t> bytes,
                  std::filesystem::path source = {});

// Keyword -> value for the extracted attribute set.
using Metadata = std::map<std::string, std::string>;

struct KeywordInfo {
  std::string_view keyword;
  Tag tag;
  std::string_view vr;
};

// PatientID, PatientName, StudyInstanceUID, SeriesInstanceUID,
// SOPInstanceUID, Modality, StudyDate, SeriesDescription, BodyPartExamined.
std::span<const KeywordInfo> ExtractedKeywords();

struct FixtureOptions {
  std::string transfer_syntax{kExplicitVrLittleEndian};
  // Adds a Referenced Image Sequence (0008,1140) with one item.
  bool include_sequence = false;
  bool undefined_length_sequence = false;
  // Appends a small Pixel Data element after the header attributes.
  bool include_pixel_data = false;
};

// Builds a minimal valid file for `metadata`. Empty values are omitted.
// Throws Error(kValidation) for unknown keywords or values illegal for their
// VR (e.g. a UID longer than 64 characters).
std::vector<std::uint8_t> WriteFixture(const Metadata& metadata,
                                       const FixtureOptions& options = {});

// Throws Error(kIngestReject) when StudyInstanceUID, SeriesInstanceUID or
// SOPInstanceUID is absent.
Metadata ExtractMetadata(const Dataset& dataset);

// Patient/Study/Series/Image nodes, hasStudy/hasSeries/hasImage edges and
// literal properties. IRIs are derived from the identifiers:
// urn:medico:patient:<PatientID>, urn:medico:study:<StudyInstanceUID>, ...
std::vector<Triple> ToTriples(const Metadata& metadata);

Term PatientIri(const Metadata& metadata);
Term StudyIri(std::string_view uid);
Term SeriesIri(std::string_view uid);
Term ImageIri(std::string_view uid);

struct IngestReport {
  std::size_t files_seen = 0;
  std::size_t accepted = 0;
  std::vector<std::pair<std::filesystem::path, std::string>> rejected;
  std::size_t patients = 0;
  std::size_t studies = 0;
  std::size_t series = 0;
  std::size_t images = 0;
};

// Parses every regular file below `directory` (sorted, recursive) and
// inserts the resulting triples in one write. Per-file failures are recorded
// in `rejected`. Throws Error(kIo) when the directory cannot be read.
IngestReport IngestDirectory(const std::filesystem::path& directory,
                             SharedStore& store);

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path);

}  // namespace medico::dicom

#endif  // MEDICO_DICOM_DICOM_H_
