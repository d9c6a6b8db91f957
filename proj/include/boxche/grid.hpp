// Copyright 2026 The Boxche Authors.
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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace boxche {

// Cache-size grid grammar (`max` stands for the trace's distinct_docs):
//   log:<lo>:<hi|max>:<n>    n log-spaced sizes, rounded and de-duplicated
//   lin:<lo>:<hi|max>:<n>    n evenly spaced sizes
//   rel:<lo>:<hi>:<n>        n log-spaced relative sizes in (0, 1]
//   <c1>,<c2>,...            explicit ascending list
// Throws std::invalid_argument on malformed specs.
std::vector<std::uint64_t> resolve_grid(std::string_view spec, std::uint64_t distinct_docs);

inline constexpr std::string_view kDefaultGridSpec = "log:1:max:40";

// Real-valued grids for time axes: `lin:<lo>:<hi>:<n>` or a comma list.
std::vector<double> resolve_time_grid(std::string_view spec);

}  // namespace boxche
