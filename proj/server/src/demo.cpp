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

#include "medico/server/demo.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "medico/bundled_data.h"
#include "medico/dicom/dicom.h"
#include "medico/error.h"
#include "medico/server/engine.h"
#include "medico/vocab.h"

namespace medico::server {
namespace fs = std::filesystem;
namespace chr = std::chrono;
using annotation::Origin;
using annotation::Payload;
using annotation::Rect;
using dialogue::PointingEvent;
using dialogue::TargetKind;

namespace {

Term Fma(std::string_view local) { return Term::Iri("urn:fma:" + std::string(local)); }
Term RadLex(std::string_view local) { return Term::Iri("urn:radlex:" + std::string(local)); }
Term Icd(std::string_view local) { return Term::Iri("urn:icd10:" + std::string(local)); }

struct SeriesSpec {
  std::string body_part;
  std::string description;
  int images;
};

struct StudySpec {
  std::string date;
  std::vector<SeriesSpec> series;
};

struct PatientSpec {
  std::string id;
  std::string name;
  std::vector<StudySpec> studies;
};

// UIDs: 2.25.<n>.<study>.<series>.<image>, n from the patient id.
std::string StudyUid(const PatientSpec& p, std::size_t study) {
  return fmt::format("2.25.{}.{}", p.id.substr(p.id.find('-') + 1), study + 1);
}

const std::vector<PatientSpec>& Cohort() {
  static const std::vector<PatientSpec> cohort = {
      {"P-1001",
       "Weber^Jonas",
       {{"20100115", {{"ABDOMEN", "CT ABDOMEN BASELINE", 2}}},
        {"20100309",
         {{"LUNG", "CT THORAX LUNG WINDOW", 2},
          {"LIVER", "CT ABDOMEN LIVER", 2},
          {"SPLEEN", "CT ABDOMEN SPLEEN", 2},
          {"COLON", "CT ABDOMEN COLON", 2}}}}},
      {"P-1002", "Maier^Peter", {{"20100222", {{"ABDOMEN", "CT ABDOMEN", 2}}}}},
      {"P-1003", "Fischer^Lena", {{"20100308", {{"NECK", "CT NECK", 2}}}}},
      {"P-1004", "Wagner^Paul", {{"20100305", {{"LIVER", "CT ABDOMEN LIVER", 2}}}}},
      {"P-1005", "Becker^Eva", {{"20091120", {{"HEART", "CT CORONARY ANGIOGRAPHY", 2}}}}},
  };
  return cohort;
}

Term ImageOf(const PatientSpec& p, std::size_t study, std::size_t series, int image) {
  return dicom::ImageIri(fmt::format("{}.{}.{}", StudyUid(p, study), series + 1, image));
}
Term SeriesOf(const PatientSpec& p, std::size_t study, std::size_t series) {
  return dicom::SeriesIri(fmt::format("{}.{}", StudyUid(p, study), series + 1));
}

void WriteFixtures(const fs::path& dir) {
  for (const PatientSpec& p : Cohort()) {
    for (std::size_t st = 0; st < p.studies.size(); ++st) {
      const StudySpec& study = p.studies[st];
      for (std::size_t se = 0; se < study.series.size(); ++se) {
        const SeriesSpec& series = study.series[se];
        for (int i = 1; i <= series.images; ++i) {
          dicom::Metadata m;
          m["PatientID"] = p.id;
          m["PatientName"] = p.name;
          m["StudyInstanceUID"] = StudyUid(p, st);
          m["SeriesInstanceUID"] = fmt::format("{}.{}", StudyUid(p, st), se + 1);
          m["SOPInstanceUID"] = fmt::format("{}.{}", m["SeriesInstanceUID"], i);
          m["StudyDate"] = study.date;
          m["Modality"] = "CT";
          m["SeriesDescription"] = series.description;
          m["BodyPartExamined"] = series.body_part;
          fs::path file = dir / p.id / m["StudyInstanceUID"] / (m["SOPInstanceUID"] + ".dcm");
          fs::create_directories(file.parent_path());
          auto bytes = dicom::WriteFixture(m, {.include_pixel_data = true});
          std::ofstream out(file, std::ios::binary);
          out.write(reinterpret_cast<const char*>(bytes.data()),
                    static_cast<std::streamsize>(bytes.size()));
          if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
        }
      }
    }
  }
}

Payload Manual(std::optional<Term> anatomy, std::vector<Term> visual, std::optional<Term> disease,
               double confidence) {
  Payload p;
  p.anatomy = std::move(anatomy);
  p.visual = std::move(visual);
  p.disease = std::move(disease);
  p.confidence = confidence;
  p.user = "dr.brandt";
  return p;
}

}  // namespace

DemoCohort SeedDemo(const fs::path& dicom_dir, SharedStore& store,
                    annotation::AnnotationService& service) {
  WriteFixtures(dicom_dir);
  dicom::IngestReport report = dicom::IngestDirectory(dicom_dir, store);
  if (!report.rejected.empty()) {
    throw Error(ErrorCode::kIngestReject,
                "demo fixture rejected: " + report.rejected.front().second);
  }
  const auto& c = Cohort();
  const PatientSpec &weber = c[0], &maier = c[1], &fischer = c[2], &wagner = c[3], &becker = c[4];

  // Baseline lymph node of the follow-up patient.
  Term baseline = service.CreateRegion(ImageOf(weber, 0, 0, 1), Rect{212, 240, 34, 28}).id;
  service.Annotate(baseline, Manual(Fma("LymphNode"), {}, Icd("C81"), 0.9));

  // Lymph node found automatically on the follow-up spleen series.
  Term clicked = service.CreateRegion(ImageOf(weber, 1, 2, 1), Rect{140, 188, 30, 26}).id;
  Payload automatic;
  automatic.anatomy = Fma("LymphNode");
  automatic.confidence = 0.85;
  automatic.user = "landmark-parser";
  automatic.origin = Origin::kAutomatic;
  service.Annotate(clicked, automatic);

  Term similar = service.CreateRegion(ImageOf(maier, 0, 0, 1), Rect{198, 226, 36, 30}).id;
  service.Annotate(similar, Manual(Fma("AbdominalLymphNode"),
                                   {RadLex("Hyperintense"), RadLex("CoarseTexture")}, Icd("C81.1"),
                                   0.95));

  Term neck = service.CreateRegion(ImageOf(fischer, 0, 0, 2), Rect{120, 96, 22, 20}).id;
  service.Annotate(neck, Manual(Fma("LymphNode"), {RadLex("Enlarged")}, Icd("C83"), 0.8));

  Term liver = service.CreateRegion(ImageOf(wagner, 0, 0, 1), Rect{80, 150, 48, 40}).id;
  service.Annotate(liver, Manual(Fma("Liver"), {RadLex("Hyperintense")}, std::nullopt, 0.9));

  service.AddLandmark(SeriesOf(becker, 0, 0), Fma("ProximalSegmentOfRightCoronaryArtery"),
                      {210, 160, 42}, 0.92);

  store.Write([&](Store& s) {
    s.Insert({dicom::StudyIri(StudyUid(maier, 0)), vocab::FindingsText(),
              Term::Literal("Enlarged abdominal lymph node, hyperintense with coarse texture. "
                            "Suspected relapse of Hodgkin lymphoma.")});
    s.Insert({dicom::StudyIri(StudyUid(weber, 0)), vocab::FindingsText(),
              Term::Literal("Lymph node in the upper abdomen. Hodgkin lymphoma confirmed.")});
  });

  return {dicom::PatientIri({{"PatientID", weber.id}}), dicom::PatientIri({{"PatientID", maier.id}}),
          ImageOf(weber, 1, 2, 1), clicked};
}

DemoCohort LocateDemoCohort(const Store& store) {
  const auto& c = Cohort();
  DemoCohort out{dicom::PatientIri({{"PatientID", c[0].id}}),
                 dicom::PatientIri({{"PatientID", c[1].id}}), ImageOf(c[0], 1, 2, 1), Term()};
  for (const Term& p : {out.follow_up_patient, out.similar_patient, out.clicked_image}) {
    if (!store.HasSubject(p)) throw Error(ErrorCode::kNotFound, "demo cohort not seeded: " + p.value());
  }
  for (const Term& region : store.Subjects(vocab::RegionOf(), out.clicked_image)) {
    for (const Term& a : store.Subjects(vocab::Annotates(), region)) {
      if (store.Contains({a, vocab::Origin(), vocab::AutomaticOrigin()})) out.clicked_region = region;
    }
  }
  if (out.clicked_region.value().empty()) {
    throw Error(ErrorCode::kNotFound, "demo region missing on " + out.clicked_image.value());
  }
  return out;
}

std::vector<DemoStep> DemoScript(const DemoCohort& cohort, chr::system_clock::time_point now) {
  auto before = [&](int ms) { return now - chr::milliseconds(ms); };
  return {
      {"Show me my patient records, lymphoma cases, for this week.", {}},
      {"Open the images, internal organs: lungs, liver, then spleen and colon of this patient.",
       {{TargetKind::kPatient, cohort.follow_up_patient, before(1200)}}},
      {"", {{TargetKind::kRegion, cohort.clicked_region, before(0)}}},
      {"This lymph node here, annotate Hodgkin-Lymphoma.",
       {{TargetKind::kRegion, cohort.clicked_region, before(800)}}},
      {"Find similar lesions with characteristics: hyper-intense and/or coarse texture.", {}},
      {"Get the findings of this patient", {}},
  };
}

namespace {

std::string KindName(TargetKind k) { return std::string(dialogue::TargetKindName(k)); }

std::string Renumber(const std::string& text) {
  static const std::regex minted(
      R"(urn:medico:(region|annotation|landmark):[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12})");
  std::map<std::string, std::string> names;
  std::map<std::string, int> counters;
  std::string out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), minted);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    out.append(text, last, static_cast<std::size_t>(m.position()) - last);
    auto [slot, added] = names.try_emplace(m.str(), "");
    if (added) slot->second = fmt::format("urn:medico:{}:#{}", m.str(1), ++counters[m.str(1)]);
    out += slot->second;
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(text, last);
  return out;
}

}  // namespace

std::string FormatTranscript(const std::vector<DemoStep>& steps,
                             const std::vector<dialogue::TurnResult>& turns,
                             chr::system_clock::time_point now) {
  std::ostringstream out;
  for (std::size_t i = 0; i < steps.size() && i < turns.size(); ++i) {
    out << "# turn " << i + 1 << '\n';
    out << "> " << steps[i].text << '\n';
    for (const PointingEvent& g : steps[i].pointing) {
      auto offset = chr::duration_cast<chr::milliseconds>(g.timestamp - now).count();
      out << "@ " << KindName(g.kind) << ' ' << g.target.value() << ' ' << offset << "ms\n";
    }
    for (const auto& act : turns[i].acts) {
      out << "act: " << dialogue::IntentName(act.intent);
      for (const auto& r : dialogue::BoundReferents(act)) {
        out << ' ' << r.path << '=' << r.target.value();
        if (!r.via.empty()) out << " (" << r.via << ')';
      }
      out << '\n';
    }
    out << "< " << turns[i].response.speak_text << '\n';
    for (const auto& d : turns[i].response.directives) {
      out << "! " << dialogue::ActionName(d.action) << ' ' << dialogue::PanelName(d.panel) << ' '
          << d.payload.dump() << '\n';
    }
    out << '\n';
  }
  return Renumber(out.str());
}

DemoRun RunDemoScript(Engine& engine) {
  DemoCohort cohort = engine.store().Read([](const Store& s) { return LocateDemoCohort(s); });
  auto now = engine.clock()();
  DemoRun run;
  run.steps = DemoScript(cohort, now);
  run.state.session_id = "demo";
  for (const DemoStep& step : run.steps) {
    run.turns.push_back(engine.dialogue().Turn(run.state, step.text, step.pointing));
  }
  run.transcript = FormatTranscript(run.steps, run.turns, now);
  return run;
}

std::string LineDiff(std::string_view expected, std::string_view actual) {
  auto lines = [](std::string_view text) {
    std::vector<std::string> v;
    std::istringstream in{std::string(text)};
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
  };
  auto a = lines(expected), b = lines(actual);
  if (a == b) return {};
  // LCS table; transcripts are a few dozen lines.
  std::vector<std::vector<int>> lcs(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::string out = "--- expected\n+++ actual\n";
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      ++i, ++j;
    } else if (j < b.size() && (i == a.size() || lcs[i][j + 1] >= lcs[i + 1][j])) {
      out += fmt::format("+{}: {}\n", j + 1, b[j]);
      ++j;
    } else {
      out += fmt::format("-{}: {}\n", i + 1, a[i]);
      ++i;
    }
  }
  return out;
}

std::string_view ExpectedTranscript() { return data::BundledFile("demo/expected_transcript.txt"); }

}  // namespace medico::server
