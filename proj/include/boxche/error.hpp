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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxche {

// Malformed input text. `line()` is 1-based and counts the header.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A value outside its admissible range (timestamps past the window,
// sub-trace durations, cache sizes).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A model quantity that cannot be evaluated on the given data, e.g. a
// hit ratio on an empty trace or a box prediction with no multi-request
// documents.
class ModelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace boxche
