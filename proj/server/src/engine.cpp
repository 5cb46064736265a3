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

#include "medico/server/engine.h"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "medico/error.h"
#include "medico/server/demo.h"
#include "medico/store/ntriples.h"

namespace medico::server {
namespace fs = std::filesystem;

namespace {

bool HasRegularFiles(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return false;
  for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::end(it);
       it.increment(ec)) {
    if (it->is_regular_file()) return true;
  }
  return false;
}

bool NonEmptyFile(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && fs::file_size(p, ec) > 0;
}

std::vector<fs::path> OntologyFiles(const fs::path& dir) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".nt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool DataLayout::Fresh() const {
  return !fs::exists(snapshot()) && !NonEmptyFile(log()) && !HasRegularFiles(dicom());
}

std::unique_ptr<Engine> Engine::Open(const Config& config) {
  return Open(config, config.MakeClock());
}

std::unique_ptr<Engine> Engine::Open(const Config& config, annotation::Clock clock) {
  config.Validate();
  std::unique_ptr<Engine> engine(new Engine(config, std::move(clock)));
  engine->Load();
  return engine;
}

Engine::Engine(Config config, annotation::Clock clock)
    : config_(std::move(config)), layout_{config_.data_dir}, clock_(std::move(clock)) {}

void Engine::Load() {
  std::error_code ec;
  fs::create_directories(layout_.root, ec);
  if (ec || !fs::is_directory(layout_.root)) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot create data directory {}: {}; pick a writable dataDir",
                            layout_.root.string(), ec.message()));
  }
  const bool fresh = layout_.Fresh();

  Store store;
  if (fs::exists(layout_.snapshot())) {
    store = LoadStore(layout_.snapshot());
  } else {
    auto files = OntologyFiles(layout_.ontologies());
    if (files.empty()) {
      LoadBundledOntologies(store);
    } else {
      for (const fs::path& f : files) {
        for (const Triple& t : ParseTriples(ReadFile(f))) store.Insert(t);
      }
    }
  }
  replayed_ = annotation::AnnotationLog::ReplayInto(layout_.log(), store);
  ontology_ = std::make_unique<Ontology>(Ontology::FromStore(store));
  store_.Write([&](Store& s) { s = std::move(store); });

  if (!fs::exists(layout_.snapshot()) && HasRegularFiles(layout_.dicom())) {
    dicom::IngestDirectory(layout_.dicom(), store_);
  }

  log_ = std::make_unique<annotation::AnnotationLog>(layout_.log());
  std::uint64_t id_seed = config_.demo_seed ? *config_.demo_seed : std::random_device{}();
  annotations_ = std::make_unique<annotation::AnnotationService>(store_, *ontology_, clock_,
                                                                 id_seed, log_.get());
  dialogue_ = std::make_unique<dialogue::DialogueManager>(
      dialogue::BundledHierarchy(), dialogue::BundledGrammar(),
      dialogue::Backend{store_, *ontology_, *annotations_, clock_, config_.Rank(),
                        config_.Fusion()});

  if (fresh && config_.demo_seed) {
    SeedDemo(layout_.dicom(), store_, *annotations_);
    seeded_ = true;
    Checkpoint();
  }
}

void Engine::Checkpoint() {
  store_.Write([&](Store& s) {
    Snapshot(s, layout_.snapshot());
    log_->Truncate();
  });
}

dicom::IngestReport Engine::Ingest(const fs::path& directory) {
  dicom::IngestReport report = dicom::IngestDirectory(directory, store_);
  Checkpoint();
  return report;
}

}  // namespace medico::server
