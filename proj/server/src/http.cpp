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

#include "medico/server/http.h"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "medico/dialogue/views.h"
#include "medico/error.h"
#include "medico/vocab.h"

namespace medico::server {
namespace chr = std::chrono;
using nlohmann::json;
namespace views = dialogue::views;

namespace {

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kUnknownTimePhrase:
    case ErrorCode::kPrecondition:
    case ErrorCode::kUnsupported:
    case ErrorCode::kFormat:
    case ErrorCode::kTruncated:
    case ErrorCode::kIngestReject: return 400;
    default: return 500;
  }
}

void Send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void Fail(httplib::Response& res, int status, std::string message, json fields = json::array()) {
  Send(res, status, json{{"error", std::move(message)}, {"fields", std::move(fields)}});
}

// Thrown by handlers for request-shape problems.
struct BadRequest {
  std::string message;
  json fields;
};

json ParseBody(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    throw BadRequest{"malformed JSON", json::array({{{"field", "body"},
                                                     {"problem", "not valid JSON"}}})};
  }
  if (!body.is_object()) {
    throw BadRequest{"request body must be a JSON object",
                     json::array({{{"field", "body"}, {"problem", "expected an object"}}})};
  }
  return body;
}

std::optional<std::string> OptString(const json& body, const char* field, json& problems) {
  if (!body.contains(field) || body[field].is_null()) return std::nullopt;
  if (!body[field].is_string()) {
    problems.push_back({{"field", field}, {"problem", "expected a string"}});
    return std::nullopt;
  }
  return body[field].get<std::string>();
}

std::string RequireString(const json& body, const char* field) {
  json problems = json::array();
  auto v = OptString(body, field, problems);
  if (!problems.empty()) throw BadRequest{"invalid request", problems};
  if (!v || v->empty()) {
    throw BadRequest{"invalid request",
                     json::array({{{"field", field}, {"problem", "required"}}})};
  }
  return *v;
}

Term PatientTerm(const std::string& id) {
  if (id.rfind("urn:", 0) == 0 || id.find("://") != std::string::npos) return Term::Iri(id);
  return dicom::PatientIri({{"PatientID", id}});
}

Term ConceptTerm(const Ontology& ontology, const std::string& text, const char* field) {
  if (text.find(':') != std::string::npos) {
    if (Term iri = Term::Iri(text); ontology.Contains(iri)) return iri;
  }
  auto found = ontology.Lookup(text);
  if (found.empty()) {
    throw BadRequest{"unknown concept",
                     json::array({{{"field", field}, {"problem", "no concept named " + text}}})};
  }
  return found.front().iri;
}

chr::system_clock::time_point GestureTime(const json& ts, chr::system_clock::time_point now) {
  if (ts.is_null()) return now;
  if (ts.is_number()) {
    return chr::system_clock::time_point(chr::milliseconds(ts.get<std::int64_t>()));
  }
  return annotation::ParseTimestamp(ts.get<std::string>());
}

std::vector<std::string> SplitTerms(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

json ValidateTurnRequest(const json& body) {
  json problems = json::array();
  if (!body.is_object()) {
    problems.push_back({{"field", "body"}, {"problem", "expected an object"}});
    return problems;
  }
  OptString(body, "sessionId", problems);
  OptString(body, "text", problems);
  if (body.contains("pointing") && !body["pointing"].is_null()) {
    const json& p = body["pointing"];
    if (!p.is_array()) {
      problems.push_back({{"field", "pointing"}, {"problem", "expected an array"}});
      return problems;
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::string at = fmt::format("pointing[{}]", i);
      const json& g = p[i];
      if (!g.is_object()) {
        problems.push_back({{"field", at}, {"problem", "expected an object"}});
        continue;
      }
      if (!g.contains("targetKind") || !g["targetKind"].is_string() ||
          !dialogue::ParseTargetKind(g["targetKind"].get<std::string>())) {
        problems.push_back(
            {{"field", at + ".targetKind"}, {"problem", "expected one of region, patient, image"}});
      }
      if (!g.contains("targetId") || !g["targetId"].is_string() ||
          g["targetId"].get<std::string>().empty()) {
        problems.push_back({{"field", at + ".targetId"}, {"problem", "expected a non-empty IRI"}});
      }
      if (g.contains("timestamp") && !g["timestamp"].is_null()) {
        const json& ts = g["timestamp"];
        bool ok = ts.is_number_integer();
        if (ts.is_string()) {
          try {
            annotation::ParseTimestamp(ts.get<std::string>());
            ok = true;
          } catch (const Error&) {
          }
        }
        if (!ok) {
          problems.push_back({{"field", at + ".timestamp"},
                              {"problem", "expected epoch milliseconds or ISO-8601 UTC"}});
        }
      }
    }
  }
  return problems;
}

struct HttpServer::Impl {
  Impl(Engine& e, SessionRegistry& s) : engine(e), sessions(s) {}

  Engine& engine;
  SessionRegistry& sessions;
  httplib::Server http;
  std::atomic<bool> stopping{false};
  std::mutex expiry_mu;
  std::condition_variable expiry_cv;

  template <typename F>
  httplib::Server::Handler Guard(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      try {
        (this->*f)(req, res);
      } catch (const BadRequest& e) {
        Fail(res, 400, e.message, e.fields);
      } catch (const Error& e) {
        Fail(res, StatusFor(e.code()), e.what());
      } catch (const json::exception& e) {
        Fail(res, 400, e.what());
      } catch (const std::exception& e) {
        Fail(res, 500, e.what());
      }
    };
  }

  void Routes() {
    http.Post("/dialogue/turn", Guard(&Impl::Turn));
    http.Get("/patients", Guard(&Impl::Patients));
    http.Get(R"(/patients/([^/]+)/findings)", Guard(&Impl::Findings));
    http.Get(R"(/patients/([^/]+)/images)", Guard(&Impl::Images));
    http.Post("/regions", Guard(&Impl::CreateRegion));
    http.Post("/annotations", Guard(&Impl::CreateAnnotation));
    http.Get("/annotations", Guard(&Impl::ListAnnotations));
    http.Get("/search", Guard(&Impl::Search));
    http.Get(R"(/ontology/(.+)/neighbors)", Guard(&Impl::Neighbors));
    http.Post("/ingest", Guard(&Impl::Ingest));
    http.Get(R"(/events/([^/]+))", Guard(&Impl::Events));
    http.Get("/health", Guard(&Impl::Health));
  }

  void Turn(const httplib::Request& req, httplib::Response& res) {
    json body = ParseBody(req);
    json problems = ValidateTurnRequest(body);
    if (!problems.empty()) throw BadRequest{"invalid turn request", problems};

    auto now = engine.clock()();
    std::vector<dialogue::PointingEvent> pointing;
    for (const json& g : body.value("pointing", json::array())) {
      pointing.push_back({*dialogue::ParseTargetKind(g["targetKind"].get<std::string>()),
                          Term::Iri(g["targetId"].get<std::string>()),
                          GestureTime(g.value("timestamp", json()), now)});
    }
    std::optional<std::string> id;
    if (body.contains("sessionId") && body["sessionId"].is_string()) id = body["sessionId"];
    std::string text = body.contains("text") && body["text"].is_string() ? body["text"] : "";

    auto session = sessions.Acquire(id);
    dialogue::TurnResult result;
    {
      std::lock_guard lock(session->turn_mu);
      try {
        result = engine.dialogue().Turn(session->state, text, std::move(pointing));
      } catch (const std::exception& e) {
        Send(res, 500,
             json{{"sessionId", session->id},
                  {"speakText", "Sorry, something went wrong while handling that. Please try again."},
                  {"directives", json::array()},
                  {"error", e.what()}});
        return;
      }
    }
    json out = dialogue::ToJson(result.response);
    json acts = json::array();
    for (const auto& act : result.acts) {
      json refs = json::object();
      for (const auto& r : dialogue::BoundReferents(act)) {
        refs[r.path] = {{"iri", r.target.value()}, {"via", r.via}};
      }
      acts.push_back({{"intent", dialogue::IntentName(act.intent)}, {"referents", refs}});
    }
    json event = out;
    event["type"] = "turn";
    sessions.Publish(*session, std::move(event));
    out["sessionId"] = session->id;
    out["acts"] = acts;
    Send(res, 200, out);
  }

  void Patients(const httplib::Request&, httplib::Response& res) {
    json out = engine.store().Read([&](const Store& s) {
      json list = json::array();
      for (const Term& p : s.Subjects(vocab::Type(), vocab::Patient())) {
        json j = views::PatientJson(s, p);
        json studies = json::array();
        for (const Term& study : s.Objects(p, vocab::HasStudy())) {
          studies.push_back(
              {{"iri", study.value()}, {"date", views::Literal(s, study, vocab::StudyDate())}});
        }
        j["studies"] = studies;
        list.push_back(std::move(j));
      }
      return list;
    });
    Send(res, 200, out);
  }

  void Findings(const httplib::Request& req, httplib::Response& res) {
    Term patient = PatientTerm(req.matches[1]);
    dialogue::InterpretedAct act;
    act.intent = dialogue::Intent::kGetFindings;
    act.slots =
        dialogue::FeatureStructure(std::string(dialogue::IntentName(act.intent)))
            .With({"PATIENT"},
                  dialogue::FeatureStructure(dialogue::fs_types::RefType(dialogue::TargetKind::kPatient))
                      .With({"ID"}, dialogue::FeatureStructure::Atom(
                                        std::string(dialogue::fs_types::kIri), patient.value())));
    auto [state, response] = engine.dialogue().Execute(act, dialogue::DialogueState{});
    if (response.directives.empty()) {
      Fail(res, 404, response.speak_text);  // unknown patient or nothing on record
      return;
    }
    Send(res, 200, response.directives.front().payload);
  }

  void Images(const httplib::Request& req, httplib::Response& res) {
    Term patient = PatientTerm(req.matches[1]);
    json out = engine.store().Read([&](const Store& s) {
      if (!s.Contains({patient, vocab::Type(), vocab::Patient()})) {
        throw Error(ErrorCode::kNotFound, "unknown patient " + patient.value());
      }
      json images = json::array();
      std::size_t index = 0;
      for (const auto& v : views::SeriesOfPatient(s, engine.ontology(), patient)) {
        for (const Term& image : s.Objects(v.series, vocab::HasImage())) {
          images.push_back(views::ImageJson(s, engine.ontology(), v, image, ++index));
        }
      }
      return json{{"patient", views::PatientJson(s, patient)}, {"images", images}};
    });
    Send(res, 200, out);
  }

  void CreateRegion(const httplib::Request& req, httplib::Response& res) {
    json body = ParseBody(req);
    Term target = Term::Iri(RequireString(body, "target"));
    auto geometry = annotation::ParseGeometry(RequireString(body, "geometry"));
    annotation::Region r = engine.annotations().CreateRegion(target, geometry);
    json out = engine.store().Read(
        [&](const Store& s) { return views::RegionJson(s, engine.ontology(), r.id); });
    Send(res, 201, out);
  }

  void CreateAnnotation(const httplib::Request& req, httplib::Response& res) {
    json body = ParseBody(req);
    json problems = json::array();
    annotation::Payload p;
    const Ontology& o = engine.ontology();
    if (auto a = OptString(body, "anatomy", problems)) p.anatomy = ConceptTerm(o, *a, "anatomy");
    if (auto d = OptString(body, "disease", problems)) p.disease = ConceptTerm(o, *d, "disease");
    if (body.contains("visual")) {
      if (!body["visual"].is_array()) {
        problems.push_back({{"field", "visual"}, {"problem", "expected an array of concepts"}});
      } else {
        for (const json& v : body["visual"]) {
          if (!v.is_string()) {
            problems.push_back({{"field", "visual"}, {"problem", "expected strings"}});
            break;
          }
          p.visual.push_back(ConceptTerm(o, v.get<std::string>(), "visual"));
        }
      }
    }
    p.free_text_value = OptString(body, "freeTextValue", problems);
    p.free_text_comment = OptString(body, "freeTextComment", problems);
    if (body.contains("confidence")) {
      if (!body["confidence"].is_number()) {
        problems.push_back({{"field", "confidence"}, {"problem", "expected a number in [0, 1]"}});
      } else {
        p.confidence = body["confidence"].get<double>();
      }
    }
    p.user = OptString(body, "user", problems).value_or("");
    if (auto origin = OptString(body, "origin", problems)) {
      auto parsed = annotation::ParseOrigin(*origin);
      if (!parsed) {
        problems.push_back({{"field", "origin"}, {"problem", "expected manual or automatic"}});
      } else {
        p.origin = *parsed;
      }
    }
    auto region = OptString(body, "region", problems);
    auto supersedes = OptString(body, "supersedes", problems);
    if (!region == !supersedes) {
      problems.push_back(
          {{"field", "region"}, {"problem", "give exactly one of region or supersedes"}});
    }
    if (!problems.empty()) throw BadRequest{"invalid annotation request", problems};

    annotation::AnnotateResult r =
        region ? engine.annotations().Annotate(Term::Iri(*region), p)
               : engine.annotations().Supersede(Term::Iri(*supersedes), p);
    json a = views::AnnotationJson(o, r.annotation);
    a["region"] = {{"iri", r.annotation.region.value()}};
    Send(res, 201, json{{"annotation", a}, {"confirmation", r.confirmation}});
  }

  void ListAnnotations(const httplib::Request& req, httplib::Response& res) {
    annotation::AnnotationFilter f;
    if (req.has_param("patient")) f.patient = PatientTerm(req.get_param_value("patient"));
    if (req.has_param("study")) f.study = Term::Iri(req.get_param_value("study"));
    if (req.has_param("region")) f.region = Term::Iri(req.get_param_value("region"));
    if (req.has_param("origin")) {
      f.origin = annotation::ParseOrigin(req.get_param_value("origin"));
      if (!f.origin) {
        throw BadRequest{"invalid filter", json::array({{{"field", "origin"},
                                                         {"problem", "manual or automatic"}}})};
      }
    }
    f.include_superseded = req.get_param_value("includeSuperseded") == "true";
    json out = json::array();
    for (const auto& a : engine.annotations().ListAnnotations(f)) {
      json j = views::AnnotationJson(engine.ontology(), a);
      j["region"] = {{"iri", a.region.value()}};
      if (a.superseded_by) j["supersededBy"] = {{"iri", a.superseded_by->value()}};
      out.push_back(std::move(j));
    }
    Send(res, 200, out);
  }

  void Search(const httplib::Request& req, httplib::Response& res) {
    search::QueryOptions options;
    if (req.has_param("from") || req.has_param("to")) {
      search::DateRange range{req.get_param_value("from"), req.get_param_value("to")};
      if (range.start.empty()) range.start = "00010101";
      if (range.end.empty()) range.end = "99991231";
      options.date_range = range;
    }
    if (req.has_param("patient")) options.patient_scope = PatientTerm(req.get_param_value("patient"));
    search::BuiltQuery built =
        search::BuildQuery(engine.ontology(), SplitTerms(req.get_param_value("terms")), options);
    json out = engine.store().Read([&](const Store& s) {
      auto results = search::SemanticSearch(s, engine.ontology(), built.query,
                                            engine.config().Rank());
      return json{{"query", views::QueryJson(engine.ontology(), built.query)},
                  {"unknownTerms", built.unknown_terms},
                  {"rows", views::ResultRows(s, engine.ontology(), results,
                                             built.query.date_range)}};
    });
    Send(res, 200, out);
  }

  void Neighbors(const httplib::Request& req, httplib::Response& res) {
    Term iri = Term::Iri(req.matches[1]);
    if (!engine.ontology().Contains(iri)) {
      throw Error(ErrorCode::kNotFound, "unknown concept " + iri.value());
    }
    ConceptNeighbors n = engine.ontology().Neighbors(iri);
    auto list = [](const std::vector<LabeledConcept>& v) {
      json a = json::array();
      for (const auto& l : v) a.push_back({{"iri", l.iri.value()}, {"label", l.label}});
      return a;
    };
    Send(res, 200,
         json{{"concept", {{"iri", n.subject.iri.value()}, {"label", n.subject.label}}},
              {"source", ConceptSourceName(n.source)},
              {"labels", n.labels},
              {"parents", list(n.parents)},
              {"children", list(n.children)},
              {"wholes", list(n.wholes)},
              {"parts", list(n.parts)}});
  }

  void Ingest(const httplib::Request& req, httplib::Response& res) {
    json body = ParseBody(req);
    dicom::IngestReport r = engine.Ingest(RequireString(body, "path"));
    json rejected = json::array();
    for (const auto& [path, why] : r.rejected) {
      rejected.push_back({{"path", path.string()}, {"reason", why}});
    }
    Send(res, 200,
         json{{"filesSeen", r.files_seen}, {"accepted", r.accepted}, {"rejected", rejected},
              {"patients", r.patients}, {"studies", r.studies}, {"series", r.series},
              {"images", r.images}});
  }

  void Events(const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto sub = sessions.Subscribe(id);
    sub->Push({{"type", "hello"}, {"sessionId", id}});
    res.set_header("Cache-Control", "no-cache");
    auto idle = std::make_shared<int>(0);
    res.set_chunked_content_provider(
        "application/x-ndjson",
        [this, sub, idle](std::size_t, httplib::DataSink& sink) {
          auto event = sub->Pop(chr::milliseconds(500));
          if (!event) {
            if (sub->closed() || stopping) {
              sink.done();
              return true;
            }
            // Heartbeat every ~15 s also notices clients that went away.
            if (++*idle < 30) return true;
            event = json{{"type", "heartbeat"}};
          }
          *idle = 0;
          std::string line = event->dump() + "\n";
          return sink.write(line.data(), line.size());
        },
        [sub](bool) { sub->Close(); });
  }

  void Health(const httplib::Request&, httplib::Response& res) {
    std::size_t triples = engine.store().Read([](const Store& s) { return s.size(); });
    Send(res, 200, json{{"status", "ok"}, {"triples", triples}, {"sessions", sessions.size()}});
  }
};

HttpServer::HttpServer(Engine& engine, SessionRegistry& sessions)
    : impl_(std::make_unique<Impl>(engine, sessions)) {
  impl_->http.new_task_queue = [] { return new httplib::ThreadPool(16); };
  impl_->Routes();
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  // httplib's default also sets SO_REUSEPORT, which would let a second
  // server share a port that is already taken.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  int bound = port;
  bool ok = port == 0 ? (bound = impl_->http.bind_to_any_port(host)) > 0
                      : impl_->http.bind_to_port(host, port);
  if (!ok) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot listen on {}:{}; the port is in use or not permitted. "
                            "Set port (or MEDICO_PORT) to a free port",
                            host, port));
  }
  return bound;
}

void HttpServer::Run() {
  std::thread expiry([this] {
    std::unique_lock lock(impl_->expiry_mu);
    while (!impl_->stopping) {
      impl_->expiry_cv.wait_for(lock, chr::seconds(10));
      if (!impl_->stopping) impl_->sessions.Expire();
    }
  });
  impl_->http.listen_after_bind();
  {
    std::lock_guard lock(impl_->expiry_mu);
    impl_->stopping = true;
  }
  impl_->expiry_cv.notify_all();
  expiry.join();
}

void HttpServer::Stop() {
  {
    std::lock_guard lock(impl_->expiry_mu);
    impl_->stopping = true;
  }
  impl_->expiry_cv.notify_all();
  impl_->sessions.CloseAll();
  impl_->http.stop();
}

}  // namespace medico::server
