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

#ifndef MEDICO_SERVER_DEMO_H_
#define MEDICO_SERVER_DEMO_H_

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medico/annotation/annotation.h"
#include "medico/dialogue/dialogue.h"
#include "medico/store/triple_store.h"

namespace medico::server {

class Engine;

// Reference time of the demo cohort (a Wednesday).
inline constexpr std::string_view kDemoClock = "2010-03-10T09:00:00Z";
inline constexpr std::uint64_t kDefaultDemoSeed = 42;

// Entities the scripted dialogue points at.
struct DemoCohort {
  Term follow_up_patient;  // Weber^Jonas, lymphoma follow-up
  Term similar_patient;    // Maier^Peter
  Term clicked_image;      // 5th image of the follow-up study (spleen, image 1)
  Term clicked_region;     // automatically found lymph node region on it
};

// Writes DICOM fixtures for five patients below `dicom_dir`, ingests them,
// adds the cohort's regions, landmarks and annotations through `service`
// and attaches report texts. Deterministic apart from minted ids, which
// follow the service's id seed.
DemoCohort SeedDemo(const std::filesystem::path& dicom_dir, SharedStore& store,
                    annotation::AnnotationService& service);

// Finds the cohort entities in a seeded store. Throws Error(kNotFound).
DemoCohort LocateDemoCohort(const Store& store);

struct DemoStep {
  std::string text;
  std::vector<dialogue::PointingEvent> pointing;
};

// The reference exchange: records, images, a region click, annotation,
// similar lesions, findings. Gestures are stamped just before `now`.
std::vector<DemoStep> DemoScript(const DemoCohort& cohort,
                                 std::chrono::system_clock::time_point now);

struct DemoRun {
  std::vector<DemoStep> steps;
  std::vector<dialogue::TurnResult> turns;
  dialogue::DialogueState state;
  std::string transcript;
};

// Runs the script against `engine` in a fresh dialogue state.
DemoRun RunDemoScript(Engine& engine);

// One block per turn: the user input, gestures, executed intents with their
// bound referents, the spoken reply and every directive as compact JSON.
// Minted region/annotation/landmark ids are renumbered in order of first
// appearance, so the text does not depend on the id seed.
std::string FormatTranscript(const std::vector<DemoStep>& steps,
                             const std::vector<dialogue::TurnResult>& turns,
                             std::chrono::system_clock::time_point now);

// Unified-style line diff, empty when equal.
std::string LineDiff(std::string_view expected, std::string_view actual);

// Bundled expected transcript.
std::string_view ExpectedTranscript();

}  // namespace medico::server

#endif  // MEDICO_SERVER_DEMO_H_
