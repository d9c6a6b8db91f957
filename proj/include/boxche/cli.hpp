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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace boxche::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kIoError = 3,
};

// Runs one command line. `argv[0]` is the program name. Data goes to
// `out` unless --out is given; diagnostics always go to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace boxche::cli
