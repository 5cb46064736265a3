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

#ifndef MEDICO_BUNDLED_DATA_H_
#define MEDICO_BUNDLED_DATA_H_

#include <map>
#include <string>
#include <string_view>

namespace medico::data {

// Data files compiled into the library, keyed by path relative to data/
// (for example "ontologies/fma_mini.nt").
const std::map<std::string, std::string_view>& BundledFiles();

// Throws Error(kNotFound) for unknown names.
std::string_view BundledFile(std::string_view name);

}  // namespace medico::data

#endif  // MEDICO_BUNDLED_DATA_H_
