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
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>

#include "medico/dicom/dicom.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::dicom {
namespace {

const std::string& Required(const Metadata& m, const std::string& keyword,
                            std::string_view tag) {
  auto it = m.find(keyword);
  if (it == m.end() || it->second.empty()) {
    throw Error(ErrorCode::kIngestReject,
                fmt::format("missing {} {}; record cannot be linked", keyword, tag));
  }
  return it->second;
}

std::optional<std::string> Optional(const Metadata& m, const std::string& keyword) {
  auto it = m.find(keyword);
  if (it == m.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

struct Uids {
  std::string study, series, sop;
};

Uids RequiredUids(const Metadata& m) {
  return Uids{Required(m, "StudyInstanceUID", "(0020,000D)"),
              Required(m, "SeriesInstanceUID", "(0020,000E)"),
              Required(m, "SOPInstanceUID", "(0008,0018)")};
}

// A file may not move an existing image, series or study to another parent;
// that would give it two parent chains.
void CheckParents(const Store& store, const std::vector<Triple>& triples) {
  for (const Triple& t : triples) {
    const Term& p = t.predicate;
    if (p != vocab::HasStudy() && p != vocab::HasSeries() && p != vocab::HasImage()) {
      continue;
    }
    for (const Term& parent : store.Subjects(p, t.object)) {
      if (parent != t.subject) {
        throw Error(ErrorCode::kIngestReject,
                    fmt::format("{} already belongs to {}", t.object.value(),
                                parent.value()));
      }
    }
  }
}

}  // namespace

Metadata ExtractMetadata(const Dataset& dataset) {
  Metadata out;
  for (const KeywordInfo& k : ExtractedKeywords()) {
    const Element* e = dataset.Find(k.tag);
    if (e != nullptr && e->text && !e->text->empty()) {
      out[std::string(k.keyword)] = *e->text;
    }
  }
  RequiredUids(out);
  return out;
}

Term PatientIri(const Metadata& m) {
  if (auto id = Optional(m, "PatientID")) {
    return Term::Iri(vocab::MintedIri("patient", PercentEncode(*id)));
  }
  // Without a patient ID the study stands alone under a synthetic patient.
  return Term::Iri(vocab::MintedIri(
      "patient", "anon-" + PercentEncode(Required(m, "StudyInstanceUID", "(0020,000D)"))));
}

Term StudyIri(std::string_view uid) {
  return Term::Iri(vocab::MintedIri("study", PercentEncode(uid)));
}
Term SeriesIri(std::string_view uid) {
  return Term::Iri(vocab::MintedIri("series", PercentEncode(uid)));
}
Term ImageIri(std::string_view uid) {
  return Term::Iri(vocab::MintedIri("image", PercentEncode(uid)));
}

std::vector<Triple> ToTriples(const Metadata& m) {
  Uids uids = RequiredUids(m);
  Term patient = PatientIri(m);
  Term study = StudyIri(uids.study);
  Term series = SeriesIri(uids.series);
  Term image = ImageIri(uids.sop);

  std::vector<Triple> out;
  auto literal = [&](const Term& s, const Term& p, const std::string& keyword) {
    if (auto v = Optional(m, keyword)) out.emplace_back(s, p, Term::Literal(*v));
  };

  out.emplace_back(patient, vocab::Type(), vocab::Patient());
  literal(patient, vocab::PatientId(), "PatientID");
  literal(patient, vocab::PatientName(), "PatientName");
  out.emplace_back(patient, vocab::HasStudy(), study);

  out.emplace_back(study, vocab::Type(), vocab::Study());
  out.emplace_back(study, vocab::StudyInstanceUid(), Term::Literal(uids.study));
  literal(study, vocab::StudyDate(), "StudyDate");
  out.emplace_back(study, vocab::HasSeries(), series);

  out.emplace_back(series, vocab::Type(), vocab::Series());
  out.emplace_back(series, vocab::SeriesInstanceUid(), Term::Literal(uids.series));
  literal(series, vocab::Modality(), "Modality");
  literal(series, vocab::SeriesDescription(), "SeriesDescription");
  literal(series, vocab::BodyPartExamined(), "BodyPartExamined");
  out.emplace_back(series, vocab::HasImage(), image);

  out.emplace_back(image, vocab::Type(), vocab::Image());
  out.emplace_back(image, vocab::SopInstanceUid(), Term::Literal(uids.sop));
  return out;
}

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

IngestReport IngestDirectory(const std::filesystem::path& directory,
                             SharedStore& store) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorCode::kIo, "not a readable directory: " + directory.string());
  }
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(directory, ec), end;
  if (ec) throw Error(ErrorCode::kIo, directory.string() + ": " + ec.message());
  for (; it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorCode::kIo, directory.string() + ": " + ec.message());
    if (it->is_regular_file(ec)) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  IngestReport report;
  report.files_seen = files.size();

  // Parsing is pure; only the insertion below takes the write lock.
  std::vector<std::pair<fs::path, std::vector<Triple>>> parsed;
  for (const fs::path& file : files) {
    try {
      Dataset ds = ParseFile(ReadBytes(file), file);
      parsed.emplace_back(file, ToTriples(ExtractMetadata(ds)));
    } catch (const Error& e) {
      report.rejected.emplace_back(
          file, fmt::format("{}: {}", ErrorCodeName(e.code()), e.what()));
    }
  }

  std::set<Term> patients, studies, series, images;
  store.Write([&](Store& s) {
    for (auto& [file, triples] : parsed) {
      try {
        CheckParents(s, triples);
      } catch (const Error& e) {
        report.rejected.emplace_back(
            file, fmt::format("{}: {}", ErrorCodeName(e.code()), e.what()));
        continue;
      }
      for (const Triple& t : triples) {
        s.Insert(t);
        if (t.predicate != vocab::Type()) continue;
        if (t.object == vocab::Patient()) patients.insert(t.subject);
        if (t.object == vocab::Study()) studies.insert(t.subject);
        if (t.object == vocab::Series()) series.insert(t.subject);
        if (t.object == vocab::Image()) images.insert(t.subject);
      }
      ++report.accepted;
    }
  });
  std::sort(report.rejected.begin(), report.rejected.end());
  report.patients = patients.size();
  report.studies = studies.size();
  report.series = series.size();
  report.images = images.size();
  return report;
}

}  // namespace medico::dicom
