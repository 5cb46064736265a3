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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "medico/dialogue/dialogue.h"
#include "medico/error.h"
#include "medico/server/cli.h"
#include "medico/server/demo.h"
#include "medico/server/http.h"
#include "support/temp_dir.h"

namespace medico::server {
namespace {

using nlohmann::json;
using testing::ScopedDir;
namespace fs = std::filesystem;

// One seeded engine and a live server on an ephemeral port for the suite.
class Live : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScopedDir("http");
    Config c;
    c.data_dir = dir_->path();
    c.demo_seed = kDefaultDemoSeed;
    c.clock = std::string(kDemoClock);
    engine_ = Engine::Open(c).release();
    sessions_ = new SessionRegistry(std::chrono::seconds(60));
    server_ = new HttpServer(*engine_, *sessions_);
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = new std::thread([] { server_->Run(); });
    cohort_ = engine_->store().Read([](const Store& s) { return LocateDemoCohort(s); });
  }
  static void TearDownTestSuite() {
    server_->Stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete sessions_;
    delete engine_;
    delete dir_;
  }

  httplib::Client Client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    return c;
  }

  json Turn(const json& body, int expect = 200) {
    auto res = Client().Post("/dialogue/turn", body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  json GetJson(const std::string& path, int expect = 200) {
    auto res = Client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    return json::parse(res->body);
  }

  // Directive payload IRIs must all name something in the store.
  void ExpectResolvable(const json& response) {
    dialogue::SystemResponse r;
    r.speak_text = response.at("speakText");
    for (const json& d : response.at("directives")) {
      ASSERT_TRUE(d.contains("action") && d.contains("panel") && d.contains("payload")) << d;
      r.directives.push_back({dialogue::Action::kOpen, dialogue::Panel::kBackground, d["payload"]});
    }
    engine_->store().Read([&](const Store& s) {
      EXPECT_TRUE(dialogue::UnresolvedIris(s, r).empty()) << response.dump();
    });
  }

  static inline ScopedDir* dir_ = nullptr;
  static inline Engine* engine_ = nullptr;
  static inline SessionRegistry* sessions_ = nullptr;
  static inline HttpServer* server_ = nullptr;
  static inline std::thread* thread_ = nullptr;
  static inline int port_ = 0;
  static inline DemoCohort cohort_;
};

TEST_F(Live, HealthAndPatients) {
  EXPECT_EQ(GetJson("/health")["status"], "ok");
  json patients = GetJson("/patients");
  std::string all = patients.dump();
  EXPECT_NE(all.find("Peter Maier"), std::string::npos);
  EXPECT_NE(all.find("Jonas Weber"), std::string::npos);
}

TEST_F(Live, TurnResponsesAreSchemaStable) {
  json r = Turn({{"text", "Show me my patient records, lymphoma cases, for this week."}});
  ASSERT_TRUE(r.contains("sessionId"));
  EXPECT_FALSE(r["speakText"].get<std::string>().empty());
  ASSERT_FALSE(r["directives"].empty());
  EXPECT_EQ(r["acts"][0]["intent"], "ShowRecords");
  ExpectResolvable(r);

  // Same session, follow-up with a gesture.
  json g = Turn({{"sessionId", r["sessionId"]},
                 {"text", "Open the images of this patient."},
                 {"pointing", {{{"targetKind", "patient"}, {"targetId", cohort_.follow_up_patient.value()}}}}});
  EXPECT_EQ(g["sessionId"], r["sessionId"]);
  EXPECT_EQ(g["acts"][0]["intent"], "OpenImages");
  EXPECT_EQ(g["acts"][0]["referents"]["PATIENT"]["via"], "gesture");
  ExpectResolvable(g);
}

TEST_F(Live, EmptyTextClarifiesAndGestureOnlySelects) {
  json empty = Turn({{"text", ""}});
  EXPECT_EQ(empty["acts"][0]["intent"], "Clarify");
  EXPECT_TRUE(empty["directives"].empty());
  EXPECT_FALSE(empty["speakText"].get<std::string>().empty());

  json select = Turn({{"pointing", {{{"targetKind", "region"},
                                     {"targetId", cohort_.clicked_region.value()},
                                     {"timestamp", "2010-03-10T09:00:00Z"}}}}});
  EXPECT_EQ(select["acts"][0]["intent"], "SelectRegion");
  ExpectResolvable(select);
}

TEST_F(Live, InvalidRequestsNameTheField) {
  json bad = Turn({{"text", 3}, {"pointing", {{{"targetKind", "elbow"}}}}}, 400);
  std::string fields = bad["fields"].dump();
  EXPECT_NE(fields.find("\"text\""), std::string::npos) << fields;
  EXPECT_NE(fields.find("pointing[0].targetKind"), std::string::npos) << fields;
  EXPECT_NE(fields.find("pointing[0].targetId"), std::string::npos) << fields;

  auto res = Client().Post("/dialogue/turn", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  EXPECT_EQ(ValidateTurnRequest(json{{"text", "hi"}}), json::array());
  EXPECT_FALSE(ValidateTurnRequest(json::array()).empty());
  EXPECT_FALSE(ValidateTurnRequest(json{{"pointing", {{{"targetKind", "region"},
                                                       {"targetId", "urn:x"},
                                                       {"timestamp", "last tuesday"}}}}})
                   .empty());
}

TEST_F(Live, ResourceEndpoints) {
  json findings = GetJson("/patients/P-1002/findings");
  EXPECT_NE(findings.dump().find("Suspected relapse"), std::string::npos);
  GetJson("/patients/P-9999/findings", 404);

  json images = GetJson("/patients/P-1001/images");
  EXPECT_NE(images.dump().find("2.25.1001.2.3.1"), std::string::npos);

  json search = GetJson("/search?terms=hyperintense,coarse%20texture");
  EXPECT_NE(search.dump().find("P-1002"), std::string::npos);

  json neighbors = GetJson("/ontology/" + httplib::detail::encode_url("urn:fma:Spleen") + "/neighbors");
  EXPECT_FALSE(neighbors.empty());

  json listed = GetJson("/annotations?patient=P-1001");
  EXPECT_FALSE(listed.empty());
}

TEST_F(Live, RegionAndAnnotationRoundTrip) {
  auto c = Client();
  json region_body = {{"target", "urn:medico:image:2.25.1004.1.1.1"},
                      {"geometry", "rect:5,6,7,8"}};
  auto res = c.Post("/regions", region_body.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201) << res->body;
  std::string region = json::parse(res->body)["iri"];

  json ann = {{"region", region}, {"anatomy", "liver"}, {"disease", "Hodgkin lymphoma"}};
  res = c.Post("/annotations", ann.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400) << "annotations without a user must be refused";
  ann["user"] = "dr.test";
  res = c.Post("/annotations", ann.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201) << res->body;
  json created = json::parse(res->body);
  EXPECT_FALSE(created["confirmation"].get<std::string>().empty());

  res = c.Post("/annotations", json{{"region", region}, {"disease", "no such disease"}, {"user", "u"}}.dump(),
               "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = c.Post("/annotations", json{{"region", "urn:medico:region:none"}, {"anatomy", "liver"}, {"user", "u"}}.dump(),
               "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST_F(Live, EventStreamReceivesTurns) {
  std::string sid = Turn({{"text", "What is the spleen?"}})["sessionId"];
  std::promise<json> got;
  std::thread reader([&] {
    auto c = Client();
    std::string buffer;
    bool done = false;
    c.Get("/events/" + sid, [&](const char* data, std::size_t n) {
      buffer.append(data, n);
      for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n')) {
        json e = json::parse(buffer.substr(0, nl));
        buffer.erase(0, nl + 1);
        if (e.value("type", "") == "turn" && !done) {
          done = true;
          got.set_value(e);
          return false;
        }
      }
      return true;
    });
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  Turn({{"sessionId", sid}, {"text", "Get the findings of this patient"}});
  auto fut = got.get_future();
  ASSERT_EQ(fut.wait_for(std::chrono::seconds(10)), std::future_status::ready);
  json e = fut.get();
  EXPECT_EQ(e["sessionId"], sid);
  EXPECT_TRUE(e.contains("speakText"));
  EXPECT_TRUE(e.contains("directives"));
  reader.join();
}

TEST_F(Live, ConcurrentSessionsStayIsolated) {
  auto run = [&](const std::string& sid, const std::string& patient) {
    for (int i = 0; i < 5; ++i) {
      json r = Turn({{"sessionId", sid},
                     {"text", "Get the findings of this patient"},
                     {"pointing", {{{"targetKind", "patient"}, {"targetId", patient}}}}});
      EXPECT_EQ(r["acts"][0]["referents"]["PATIENT"]["iri"], patient);
    }
  };
  std::thread a(run, "iso-a", "urn:medico:patient:P-1002");
  std::thread b(run, "iso-b", "urn:medico:patient:P-1003");
  a.join();
  b.join();
  EXPECT_EQ(sessions_->Find("iso-a")->state.focus.patient->value(), "urn:medico:patient:P-1002");
  EXPECT_EQ(sessions_->Find("iso-b")->state.focus.patient->value(), "urn:medico:patient:P-1003");
}

TEST(HttpBind, TakenPortIsReported) {
  ScopedDir dir("bind");
  Config c;
  c.data_dir = dir.path();
  auto engine = Engine::Open(c);
  SessionRegistry sessions(std::chrono::seconds(60));
  HttpServer first(*engine, sessions);
  int port = first.Bind("127.0.0.1", 0);
  HttpServer second(*engine, sessions);
  try {
    second.Bind("127.0.0.1", port);
    FAIL() << "second bind succeeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("port"), std::string::npos);
  }
}

// ---- CLI ---------------------------------------------------------------------

struct CliRun {
  int code;
  std::string out, err;
};

CliRun Cli(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  args.insert(args.begin(), "medico");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto lookup = [env](const std::string& name) -> std::optional<std::string> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err, lookup);
  return {code, out.str(), err.str()};
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"query"}).code, 2);

  ScopedDir dir("cli");
  std::ofstream(dir / "ok.rq") << "SELECT ?p WHERE { ?p <" << "urn:medico:vocab:patientName"
                               << "> ?n }";
  std::ofstream(dir / "order.rq") << "SELECT ?p WHERE { ?p ?q ?r } ORDER BY ?p";
  std::string data = (dir / "data").string();
  CliRun ok = Cli({"--data-dir", data, "query", (dir / "ok.rq").string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out.rfind("?p", 0), 0u) << ok.out;
  CliRun order = Cli({"--data-dir", data, "query", (dir / "order.rq").string()});
  EXPECT_EQ(order.code, 1);
  EXPECT_NE(order.err.find("unsupported feature: ORDER"), std::string::npos) << order.err;
  EXPECT_EQ(Cli({"--data-dir", data, "query", (dir / "missing.rq").string()}).code, 1);
  EXPECT_EQ(Cli({"--data-dir", data, "ingest", data}, {{"MEDICO_PORT", "0"}}).code, 1);

  fs::create_directories(dir / "empty");
  CliRun ingest = Cli({"--data-dir", data, "ingest", (dir / "empty").string()});
  EXPECT_EQ(ingest.code, 0) << ingest.err;
}

TEST(Cli, DemoScriptMatchesAndRefusesUsedDirectories) {
  CliRun run = Cli({"demo-script"});
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, ExpectedTranscript());
  EXPECT_NE(run.err.find("match the expected transcript"), std::string::npos) << run.err;

  ScopedDir dir("cli_demo");
  std::ofstream(dir / "snapshot.nt") << "";
  EXPECT_EQ(Cli({"--data-dir", dir.path().string(), "demo-script"}).code, 1);
}

}  // namespace
}  // namespace medico::server
