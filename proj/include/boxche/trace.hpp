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

// Request traces: ingestion, serialization, session consolidation and
// sub-trace extraction.
//
// Time is integer milliseconds from the start of the observation window.
// Document and user identifiers are interned per trace; events refer to
// them by dense index.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace boxche {

using Millis = std::int64_t;

enum class DocId : std::uint32_t {};
enum class UserId : std::uint32_t {};

constexpr std::uint32_t index_of(DocId d) noexcept { return static_cast<std::uint32_t>(d); }
constexpr std::uint32_t index_of(UserId u) noexcept { return static_cast<std::uint32_t>(u); }

struct RequestEvent {
  Millis timestamp = 0;
  DocId doc{};
  std::optional<UserId> user;

  friend bool operator==(const RequestEvent&, const RequestEvent&) = default;
};

struct ObservationWindow {
  Millis length = 1;

  friend bool operator==(ObservationWindow, ObservationWindow) = default;
};

// Bidirectional string <-> dense index table.
class Interner {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t index) const { return names_.at(index); }
  std::size_t size() const noexcept { return names_.size(); }

  friend bool operator==(const Interner& a, const Interner& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

class Trace {
 public:
  Trace() = default;
  explicit Trace(ObservationWindow window) : window_(window) {}

  DocId intern_doc(std::string_view name) { return DocId{docs_.intern(name)}; }
  UserId intern_user(std::string_view name) { return UserId{users_.intern(name)}; }
  const std::string& doc_name(DocId d) const { return docs_.name(index_of(d)); }
  const std::string& user_name(UserId u) const { return users_.name(index_of(u)); }
  std::optional<DocId> find_doc(std::string_view name) const;

  // Size of the document table; may exceed the number of documents that
  // actually appear in `events()`.
  std::size_t doc_table_size() const noexcept { return docs_.size(); }
  bool has_users() const noexcept { return users_.size() > 0; }

  const std::vector<RequestEvent>& events() const noexcept { return events_; }
  ObservationWindow window() const noexcept { return window_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  // Replaces the events, stably sorting them by timestamp. Throws
  // RangeError if a timestamp falls outside [0, window.length].
  void set_events(std::vector<RequestEvent> events);
  void set_window(ObservationWindow window);

  // Same identifier tables and window, no events.
  Trace with_same_tables() const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<RequestEvent> events_;
  ObservationWindow window_;
  Interner docs_;
  Interner users_;
};

struct TraceSummary {
  std::uint64_t total_requests = 0;
  std::uint64_t distinct_docs = 0;       // N
  std::uint64_t docs_single_request = 0; // N1
  std::uint64_t docs_multi_request = 0;  // N2
  double mean_requests_multi = 0.0;      // E[n | n >= 2], 0 when N2 == 0

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

// Per-document request count with first and last request time, indexed by
// DocId. Documents without requests have count 0.
struct DocActivity {
  std::uint64_t count = 0;
  Millis first = 0;
  Millis last = 0;
};
std::vector<DocActivity> doc_activity(const Trace& trace);

constexpr Millis kDefaultSessionGapMs = 480'000;

// CSV with header `timestamp_ms,doc_id[,user_id]`, LF or CRLF endings.
// Without `window_length` the window is the largest timestamp (at least
// 1 ms).
Trace parse_trace(std::istream& in, std::optional<Millis> window_length = std::nullopt);
Trace parse_trace(std::string_view text, std::optional<Millis> window_length = std::nullopt);
Trace read_trace_file(const std::string& path, std::optional<Millis> window_length = std::nullopt);

// Inverse of parse_trace. The user column is written iff the trace has a
// user table.
void write_trace(std::ostream& out, const Trace& trace);
std::string serialize_trace(const Trace& trace);

// Collapses, per (user, doc) pair, every maximal run of requests whose
// successive gaps are below `gap_threshold` into a single event at the
// run's first timestamp. Throws ModelError if an event lacks a user.
Trace consolidate_sessions(const Trace& trace, Millis gap_threshold = kDefaultSessionGapMs);

// Densest closed interval [s, s + duration] over candidate starts s at
// event timestamps (earliest on ties), re-based to 0 with window
// `duration`.
Trace extract_subtrace(const Trace& trace, Millis duration);

TraceSummary trace_stats(const Trace& trace);

}  // namespace boxche
