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

#ifndef MEDICO_SERVER_CONFIG_H_
#define MEDICO_SERVER_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "medico/dialogue/dialogue.h"
#include "medico/search/search.h"

namespace medico::server {

// Flat `key = value` file, '#' comments. Keys are camelCase; each one can be
// overridden from the environment as MEDICO_<UPPER_SNAKE_KEY>, e.g.
// dataDir -> MEDICO_DATA_DIR.
struct Config {
  std::filesystem::path data_dir = "medico-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  int expansion_depth = 2;
  double lambda = 0.5;
  double fusion_window_seconds = 5.0;
  std::optional<std::uint64_t> demo_seed;
  int session_ttl_seconds = 1800;
  // Pins the service clock (ISO-8601 UTC); unset means wall time.
  std::optional<std::string> clock;

  // Throws Error(kConfig) naming the key for out-of-range values.
  void Validate() const;

  search::RankParams Rank() const;
  dialogue::FusionParams Fusion() const;
  annotation::Clock MakeClock() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> ProcessEnv(const std::string& name);

// Applies `text` on top of `base`. Throws Error(kConfig) with the line for
// unknown keys and unparsable values.
Config ParseConfig(std::string_view text, Config base = {});
// Overrides from the environment, then validates.
Config ApplyEnvironment(Config config, const EnvLookup& env = ProcessEnv);
// File (if given) + environment, validated.
Config LoadConfig(const std::optional<std::filesystem::path>& file,
                  const EnvLookup& env = ProcessEnv);

// "dataDir" -> "MEDICO_DATA_DIR".
std::string EnvName(std::string_view key);

}  // namespace medico::server

#endif  // MEDICO_SERVER_CONFIG_H_
