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

#ifndef MEDICO_SERVER_HTTP_H_
#define MEDICO_SERVER_HTTP_H_

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "medico/server/engine.h"
#include "medico/server/sessions.h"

namespace medico::server {

// JSON-over-HTTP front end:
//   POST /dialogue/turn            {sessionId?, text, pointing:[{targetKind,targetId,timestamp}]}
//   GET  /patients                 GET /patients/{id}/findings   GET /patients/{id}/images
//   POST /regions                  {target, geometry}
//   POST /annotations              {region | supersedes, anatomy?, visual?, disease?, ...}
//   GET  /annotations?patient=&study=&region=&origin=&includeSuperseded=
//   GET  /search?terms=a,b&from=YYYYMMDD&to=YYYYMMDD&patient=
//   GET  /ontology/{iri}/neighbors POST /ingest {path}
//   GET  /events/{sessionId}       newline-delimited JSON, one event per line
//   GET  /health
// {id} is a PatientID or a patient IRI. Errors come back as
// {"error": message, "fields": [...]} with a 4xx/5xx status.
class HttpServer {
 public:
  HttpServer(Engine& engine, SessionRegistry& sessions);
  ~HttpServer();

  // Port 0 picks a free one. Returns the bound port; throws Error(kIo) with
  // a remedy when the address is taken.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind().
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Schema check of a /dialogue/turn body. Returns {field, problem} pairs;
// empty when valid.
nlohmann::json ValidateTurnRequest(const nlohmann::json& body);

}  // namespace medico::server

#endif  // MEDICO_SERVER_HTTP_H_
