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

#include "medico/server/cli.h"

#include <pthread.h>
#include <unistd.h>

#include <csignal>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "medico/error.h"
#include "medico/server/demo.h"
#include "medico/server/engine.h"
#include "medico/server/http.h"
#include "medico/store/ntriples.h"
#include "medico/store/sparql.h"

namespace medico::server {
namespace fs = std::filesystem;
namespace chr = std::chrono;

namespace {

struct Options {
  std::string config_file;
  std::string data_dir;
  std::string ingest_path;
  std::string query_file;
  bool no_check = false;
};

Config Resolve(const Options& o, const EnvLookup& env) {
  std::optional<fs::path> file;
  if (!o.config_file.empty()) file = o.config_file;
  Config c = LoadConfig(file, env);
  if (!o.data_dir.empty()) c.data_dir = o.data_dir;
  c.Validate();
  return c;
}

int Serve(const Config& config, std::ostream& out, std::ostream& err) {
  // Signals go to a dedicated waiter thread rather than a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto engine = Engine::Open(config);
  SessionRegistry sessions(chr::seconds(config.session_ttl_seconds));
  HttpServer http(*engine, sessions);
  int port = http.Bind(config.host, config.port);
  out << fmt::format("medico listening on http://{}:{} (data {}{})", config.host, port,
                     config.data_dir.string(), engine->seeded() ? ", demo cohort seeded" : "")
      << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.Stop();  // also reached when we wake it below; stopping twice is fine
  });
  http.Run();
  pthread_kill(waiter.native_handle(), SIGTERM);  // blocked, so only the waiter sees it
  waiter.join();
  engine->Checkpoint();
  err << "medico stopped; snapshot written" << std::endl;
  return 0;
}

int Ingest(const Config& config, const std::string& path, std::ostream& out) {
  auto engine = Engine::Open(config);
  dicom::IngestReport r = engine->Ingest(path);
  out << fmt::format("files: {}\naccepted: {}\nrejected: {}\npatients: {}\nstudies: {}\n"
                     "series: {}\nimages: {}\n",
                     r.files_seen, r.accepted, r.rejected.size(), r.patients, r.studies, r.series,
                     r.images);
  for (const auto& [file, why] : r.rejected) out << "rejected\t" << file.string() << '\t' << why << '\n';
  return 0;
}

int Query(const Config& config, const std::string& file, std::ostream& out) {
  sparql::Query q = sparql::ParseQuery(ReadFile(file));
  auto engine = Engine::Open(config);
  sparql::SolutionSet rows = engine->store().Read([&](const Store& s) { return sparql::Evaluate(s, q); });
  out << sparql::FormatSolutions(rows);
  return 0;
}

int Demo(Config config, bool explicit_dir, bool no_check, std::ostream& out, std::ostream& err) {
  auto started = chr::steady_clock::now();
  config.clock = std::string(kDemoClock);
  if (!config.demo_seed) config.demo_seed = kDefaultDemoSeed;
  fs::path scratch;
  if (!explicit_dir) {
    scratch = fs::temp_directory_path() / fmt::format("medico-demo-{}", ::getpid());
    fs::remove_all(scratch);
    config.data_dir = scratch;
  }
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      if (!dir.empty()) fs::remove_all(dir, ec);
    }
  } cleanup{scratch};

  if (!DataLayout{config.data_dir}.Fresh()) {
    err << "demo-script needs an empty data directory; " << config.data_dir.string()
        << " already holds data\n";
    return 1;
  }
  auto engine = Engine::Open(config);
  DemoRun run = RunDemoScript(*engine);
  out << run.transcript;
  if (no_check) return 0;

  std::string diff = LineDiff(ExpectedTranscript(), run.transcript);
  auto ms = chr::duration_cast<chr::milliseconds>(chr::steady_clock::now() - started).count();
  if (!diff.empty()) {
    err << "demo-script: transcript differs from the expected one\n" << diff;
    return 1;
  }
  err << fmt::format("demo-script: {} turns match the expected transcript ({} ms)\n",
                     run.turns.size(), ms);
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
           const EnvLookup& env) {
  CLI::App app{"MEDICO radiology dialogue and retrieval engine", "medico"};
  Options o;
  app.add_option("-c,--config", o.config_file, "key = value configuration file");
  app.add_option("-d,--data-dir", o.data_dir, "data directory (overrides dataDir)");
  app.require_subcommand(1);
  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON service");
  auto* ingest = app.add_subcommand("ingest", "ingest a directory of DICOM files");
  ingest->add_option("path", o.ingest_path, "directory to scan")->required();
  auto* query = app.add_subcommand("query", "evaluate a SPARQL-subset query file");
  query->add_option("file", o.query_file, "query file")->required();
  auto* demo = app.add_subcommand("demo-script", "run the reference dialogue headlessly");
  demo->add_flag("--no-check", o.no_check, "print the transcript without comparing it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "medico: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    Config config = Resolve(o, env);
    if (serve->parsed()) return Serve(config, out, err);
    if (ingest->parsed()) return Ingest(config, o.ingest_path, out);
    if (query->parsed()) return Query(config, o.query_file, out);
    if (demo->parsed()) return Demo(config, !o.data_dir.empty(), o.no_check, out, err);
  } catch (const Error& e) {
    err << "medico: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "medico: internal error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace medico::server
