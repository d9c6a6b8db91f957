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

// Shared generators for property-style tests.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "boxche/trace.hpp"

namespace boxche::testing {

// `requests` events over `docs` documents with Zipf-ish skew, timestamps
// uniform on [0, window].
inline Trace random_trace(std::mt19937_64& rng, std::size_t requests, std::size_t docs, Millis window) {
  Trace t{ObservationWindow{window}};
  std::vector<double> w(docs);
  for (std::size_t i = 0; i < docs; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::uniform_int_distribution<Millis> when(0, window);
  std::vector<RequestEvent> ev;
  for (std::size_t i = 0; i < requests; ++i) {
    ev.push_back({when(rng), t.intern_doc("doc" + std::to_string(pick(rng))), std::nullopt});
  }
  t.set_events(std::move(ev));
  return t;
}

inline Trace trace_of(std::initializer_list<std::pair<Millis, const char*>> events, Millis window) {
  Trace t{ObservationWindow{window}};
  std::vector<RequestEvent> ev;
  for (auto [ts, d] : events) ev.push_back({ts, t.intern_doc(d), std::nullopt});
  t.set_events(std::move(ev));
  return t;
}

// Per-document timestamps in trace order, keyed by document name.
inline std::map<std::string, std::vector<Millis>> times_by_doc(const Trace& t) {
  std::map<std::string, std::vector<Millis>> out;
  for (const auto& e : t.events()) out[t.doc_name(e.doc)].push_back(e.timestamp);
  return out;
}

}  // namespace boxche::testing
