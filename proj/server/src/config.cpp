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

#include "medico/server/config.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <fmt/format.h>

#include "medico/error.h"
#include "medico/store/ntriples.h"

namespace medico::server {
namespace {

constexpr std::string_view kKeys[] = {"dataDir", "host",  "port",  "expansionDepth",
                                      "lambda",  "fusionWindowSeconds", "demoSeed",
                                      "sessionTtlSeconds", "clock"};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T Number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: \"{}\" is not a valid number", key, value));
  }
  return out;
}

// Returns false for unknown keys.
bool Set(Config& c, std::string_view key, std::string_view value) {
  if (key == "dataDir") {
    c.data_dir = std::string(value);
  } else if (key == "host") {
    c.host = std::string(value);
  } else if (key == "port") {
    c.port = Number<int>(key, value);
  } else if (key == "expansionDepth") {
    c.expansion_depth = Number<int>(key, value);
  } else if (key == "lambda") {
    c.lambda = Number<double>(key, value);
  } else if (key == "fusionWindowSeconds") {
    c.fusion_window_seconds = Number<double>(key, value);
  } else if (key == "demoSeed") {
    if (value.empty() || value == "none") {
      c.demo_seed.reset();
    } else {
      c.demo_seed = Number<std::uint64_t>(key, value);
    }
  } else if (key == "sessionTtlSeconds") {
    c.session_ttl_seconds = Number<int>(key, value);
  } else if (key == "clock") {
    if (value.empty()) {
      c.clock.reset();
    } else {
      c.clock = std::string(value);
    }
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::string EnvName(std::string_view key) {
  std::string out = "MEDICO_";
  for (char ch : key) {
    if (std::isupper(static_cast<unsigned char>(ch))) out += '_';
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

std::optional<std::string> ProcessEnv(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

void Config::Validate() const {
  auto fail = [](std::string_view key, std::string why) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: {}", key, why));
  };
  if (data_dir.empty()) fail("dataDir", "must not be empty");
  std::error_code ec;
  if (std::filesystem::exists(data_dir, ec) && !std::filesystem::is_directory(data_dir, ec)) {
    fail("dataDir", data_dir.string() + " exists and is not a directory");
  }
  if (port < 1 || port > 65535) fail("port", fmt::format("{} is outside [1, 65535]", port));
  if (expansion_depth < 0 || expansion_depth > Ontology::kDistanceCap) {
    fail("expansionDepth",
         fmt::format("{} is outside [0, {}]", expansion_depth, Ontology::kDistanceCap));
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda", fmt::format("{} is outside (0, 1]", lambda));
  if (!(fusion_window_seconds > 0.0 && fusion_window_seconds <= 60.0)) {
    fail("fusionWindowSeconds", fmt::format("{} is outside (0, 60]", fusion_window_seconds));
  }
  if (session_ttl_seconds < 1) fail("sessionTtlSeconds", "must be positive");
  if (clock) {
    try {
      annotation::ParseTimestamp(*clock);
    } catch (const Error& e) {
      fail("clock", e.what());
    }
  }
}

search::RankParams Config::Rank() const {
  search::RankParams p;
  p.lambda = lambda;
  p.max_depth = expansion_depth;
  return p;
}

dialogue::FusionParams Config::Fusion() const {
  return {std::chrono::milliseconds(std::llround(fusion_window_seconds * 1000.0))};
}

annotation::Clock Config::MakeClock() const {
  if (clock) return annotation::FixedClock(annotation::ParseTimestamp(*clock));
  return [] { return std::chrono::system_clock::now(); };
}

Config ParseConfig(std::string_view text, Config base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = Trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, fmt::format("line {}: expected key = value", number));
    }
    std::string_view key = Trim(s.substr(0, eq));
    std::string_view value = Trim(s.substr(eq + 1));
    try {
      if (!Set(base, key, value)) {
        throw Error(ErrorCode::kConfig, fmt::format("unknown key \"{}\"", key));
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, fmt::format("line {}: {}", number, e.what()));
    }
  }
  return base;
}

Config ApplyEnvironment(Config config, const EnvLookup& env) {
  for (std::string_view key : kKeys) {
    if (auto v = env(EnvName(key))) {
      try {
        Set(config, key, Trim(*v));
      } catch (const Error& e) {
        throw Error(ErrorCode::kConfig, fmt::format("{}: {}", EnvName(key), e.what()));
      }
    }
  }
  config.Validate();
  return config;
}

Config LoadConfig(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  Config config;
  if (file) {
    std::string text;
    try {
      text = ReadFile(*file);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, e.what());
    }
    try {
      config = ParseConfig(text);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: {}", file->string(), e.what()));
    }
  }
  return ApplyEnvironment(std::move(config), env);
}

}  // namespace medico::server
