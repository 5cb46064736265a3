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

#ifndef MEDICO_SERVER_ENGINE_H_
#define MEDICO_SERVER_ENGINE_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>

#include "medico/annotation/annotation.h"
#include "medico/dialogue/dialogue.h"
#include "medico/dicom/dicom.h"
#include "medico/ontology/ontology.h"
#include "medico/server/config.h"
#include "medico/store/triple_store.h"

namespace medico::server {

// On-disk layout below Config::data_dir.
struct DataLayout {
  std::filesystem::path root;
  std::filesystem::path ontologies() const { return root / "ontologies"; }
  std::filesystem::path dicom() const { return root / "dicom"; }
  std::filesystem::path snapshot() const { return root / "snapshot.nt"; }
  std::filesystem::path log() const { return root / "annotations.log"; }
  // Nothing worth loading yet: no snapshot, log or DICOM files.
  bool Fresh() const;
};

// Everything a running service needs, wired together. Startup state is the
// snapshot when one exists, else ontologies (dataDir/ontologies/*.nt or the
// bundled mini ontologies) plus whatever sits in dataDir/dicom; the
// annotation log is replayed on top either way.
class Engine {
 public:
  // Creates the data dir when missing. Seeds the demo cohort when the dir is
  // fresh and config.demo_seed is set. Throws Error(kIo/kConfig/kParse) with
  // the offending path.
  static std::unique_ptr<Engine> Open(const Config& config);
  static std::unique_ptr<Engine> Open(const Config& config, annotation::Clock clock);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Writes the snapshot atomically and then empties the log, both under the
  // store's write lock. A crash between the two leaves a log whose batches
  // are already in the snapshot, and replaying them changes nothing.
  void Checkpoint();

  // Ingests below `directory` and checkpoints, since DICOM triples never go
  // through the annotation log.
  dicom::IngestReport Ingest(const std::filesystem::path& directory);

  const Config& config() const { return config_; }
  const DataLayout& layout() const { return layout_; }
  SharedStore& store() { return store_; }
  const Ontology& ontology() const { return *ontology_; }
  annotation::AnnotationService& annotations() { return *annotations_; }
  dialogue::DialogueManager& dialogue() { return *dialogue_; }
  const annotation::Clock& clock() const { return clock_; }
  std::size_t replayed_batches() const { return replayed_; }
  bool seeded() const { return seeded_; }

 private:
  Engine(Config config, annotation::Clock clock);
  void Load();

  Config config_;
  DataLayout layout_;
  annotation::Clock clock_;
  SharedStore store_;
  std::unique_ptr<Ontology> ontology_;
  std::unique_ptr<annotation::AnnotationLog> log_;
  std::unique_ptr<annotation::AnnotationService> annotations_;
  std::unique_ptr<dialogue::DialogueManager> dialogue_;
  std::size_t replayed_ = 0;
  bool seeded_ = false;
};

}  // namespace medico::server

#endif  // MEDICO_SERVER_ENGINE_H_
