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

#include "medico/bundled_data.h"
#include "medico/error.h"

namespace medico::data {

std::string_view BundledFile(std::string_view name) {
  const auto& files = BundledFiles();
  auto it = files.find(std::string(name));
  if (it == files.end()) {
    throw Error(ErrorCode::kNotFound, "no bundled file " + std::string(name));
  }
  return it->second;
}

}  // namespace medico::data
