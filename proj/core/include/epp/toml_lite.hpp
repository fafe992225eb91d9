// Copyright 2026 The epp Authors
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

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace epp {

/// Reads the subset of TOML used by sweep configs into JSON:
///   - `# comments`, `[table]` and `[dotted.table]` headers,
///   - `key = value` with bare, quoted or dotted keys,
///   - basic strings, integers, floats (incl. inf/nan), booleans,
///   - arrays (nested, multi-line, trailing comma) and inline tables.
/// Arrays of tables, dates and multi-line strings are rejected.
/// Throws epp::Error with a line number on malformed input.
nlohmann::json parse_toml_subset(std::string_view text);

}  // namespace epp
