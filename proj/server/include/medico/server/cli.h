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

#ifndef MEDICO_SERVER_CLI_H_
#define MEDICO_SERVER_CLI_H_

#include <iosfwd>

#include "medico/server/config.h"

namespace medico::server {

// medico [--config FILE] [--data-dir DIR] <serve | ingest PATH | query FILE | demo-script>
//
// Exit codes: 0 success, 1 failure (bad data, unsupported query, transcript
// mismatch), 2 usage errors such as an unknown subcommand.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
           const EnvLookup& env = ProcessEnv);

}  // namespace medico::server

#endif  // MEDICO_SERVER_CLI_H_
