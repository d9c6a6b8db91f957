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

#include "boxche/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "boxche/error.hpp"

namespace boxche {

std::uint32_t Interner::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<DocId> Trace::find_doc(std::string_view name) const {
  if (auto i = docs_.find(name)) return DocId{*i};
  return std::nullopt;
}

void Trace::set_events(std::vector<RequestEvent> events) {
  for (const auto& e : events) {
    if (e.timestamp < 0 || e.timestamp > window_.length) {
      throw RangeError("timestamp " + std::to_string(e.timestamp) +
                       " outside window [0, " + std::to_string(window_.length) + "]");
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const RequestEvent& a, const RequestEvent& b) { return a.timestamp < b.timestamp; });
  events_ = std::move(events);
}

void Trace::set_window(ObservationWindow window) {
  if (window.length <= 0) throw RangeError("observation window must be positive");
  if (!events_.empty() && events_.back().timestamp > window.length) {
    throw RangeError("window shorter than the last timestamp");
  }
  window_ = window;
}

Trace Trace::with_same_tables() const {
  Trace t = *this;
  t.events_.clear();
  return t;
}

std::vector<DocActivity> doc_activity(const Trace& trace) {
  std::vector<DocActivity> act(trace.doc_table_size());
  for (const auto& e : trace.events()) {
    auto& a = act[index_of(e.doc)];
    if (a.count == 0) a.first = e.timestamp;
    a.last = e.timestamp;
    ++a.count;
  }
  return act;
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

Trace parse_trace(std::istream& in, std::optional<Millis> window_length) {
  if (window_length && *window_length <= 0) throw RangeError("window length must be positive");

  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "missing header");
  ++line_no;
  const auto header = strip_cr(raw);
  bool with_user = false;
  if (header == "timestamp_ms,doc_id,user_id") {
    with_user = true;
  } else if (header != "timestamp_ms,doc_id") {
    throw ParseError(1, "expected header 'timestamp_ms,doc_id[,user_id]'");
  }

  Trace trace;
  std::vector<RequestEvent> events;
  Millis max_ts = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    const std::size_t want = with_user ? 3 : 2;
    if (fields.size() != want) {
      throw ParseError(line_no, "expected " + std::to_string(want) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    Millis ts = 0;
    const auto f = fields[0];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), ts);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
      throw ParseError(line_no, "timestamp '" + std::string(f) + "' is not an integer");
    }
    if (ts < 0) throw ParseError(line_no, "negative timestamp");
    if (fields[1].empty()) throw ParseError(line_no, "empty doc_id");
    if (window_length && ts > *window_length) {
      throw RangeError("line " + std::to_string(line_no) + ": timestamp " + std::to_string(ts) +
                       " exceeds window " + std::to_string(*window_length));
    }
    RequestEvent e{ts, trace.intern_doc(fields[1]), std::nullopt};
    if (with_user && !fields[2].empty()) e.user = trace.intern_user(fields[2]);
    max_ts = std::max(max_ts, ts);
    events.push_back(e);
  }
  if (with_user && !trace.has_users()) trace.intern_user("");  // keep the column on output

  trace.set_window(ObservationWindow{window_length.value_or(std::max<Millis>(max_ts, 1))});
  trace.set_events(std::move(events));
  return trace;
}

Trace parse_trace(std::string_view text, std::optional<Millis> window_length) {
  std::istringstream in{std::string(text)};
  return parse_trace(in, window_length);
}

Trace read_trace_file(const std::string& path, std::optional<Millis> window_length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return parse_trace(in, window_length);
}

void write_trace(std::ostream& out, const Trace& trace) {
  const bool with_user = trace.has_users();
  out << (with_user ? "timestamp_ms,doc_id,user_id\n" : "timestamp_ms,doc_id\n");
  for (const auto& e : trace.events()) {
    out << e.timestamp << ',' << trace.doc_name(e.doc);
    if (with_user) {
      out << ',';
      if (e.user) out << trace.user_name(*e.user);
    }
    out << '\n';
  }
}

std::string serialize_trace(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace consolidate_sessions(const Trace& trace, Millis gap_threshold) {
  if (gap_threshold < 0) throw RangeError("gap threshold must be non-negative");
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  std::map<Key, Millis> last_seen;  // last raw timestamp of the open run
  std::vector<RequestEvent> kept;
  kept.reserve(trace.size());
  for (const auto& e : trace.events()) {
    if (!e.user) throw ModelError("session consolidation needs a user_id on every request");
    const Key key{index_of(*e.user), index_of(e.doc)};
    auto it = last_seen.find(key);
    if (it != last_seen.end() && e.timestamp - it->second < gap_threshold) {
      it->second = e.timestamp;
      continue;
    }
    last_seen[key] = e.timestamp;
    kept.push_back(e);
  }
  Trace out = trace.with_same_tables();
  out.set_events(std::move(kept));
  return out;
}

Trace extract_subtrace(const Trace& trace, Millis duration) {
  if (duration <= 0 || duration > trace.window().length) {
    throw RangeError("sub-trace duration must lie in (0, " + std::to_string(trace.window().length) +
                     "]");
  }
  Trace out = trace.with_same_tables();
  out.set_window(ObservationWindow{duration});
  const auto& ev = trace.events();
  if (ev.empty()) return out;

  std::size_t best_begin = 0, best_end = 0, hi = 0;
  for (std::size_t lo = 0; lo < ev.size(); ++lo) {
    if (lo > 0 && ev[lo].timestamp == ev[lo - 1].timestamp) continue;  // same start
    hi = std::max(hi, lo);
    while (hi < ev.size() && ev[hi].timestamp - ev[lo].timestamp <= duration) ++hi;
    if (hi - lo > best_end - best_begin) {
      best_begin = lo;
      best_end = hi;
    }
  }
  const Millis start = ev[best_begin].timestamp;
  std::vector<RequestEvent> kept(ev.begin() + static_cast<std::ptrdiff_t>(best_begin),
                                 ev.begin() + static_cast<std::ptrdiff_t>(best_end));
  for (auto& e : kept) e.timestamp -= start;
  out.set_events(std::move(kept));
  return out;
}

TraceSummary trace_stats(const Trace& trace) {
  TraceSummary s;
  s.total_requests = trace.size();
  std::uint64_t multi_requests = 0;
  for (const auto& a : doc_activity(trace)) {
    if (a.count == 0) continue;
    ++s.distinct_docs;
    if (a.count == 1) {
      ++s.docs_single_request;
    } else {
      ++s.docs_multi_request;
      multi_requests += a.count;
    }
  }
  if (s.docs_multi_request > 0) {
    s.mean_requests_multi =
        static_cast<double>(multi_requests) / static_cast<double>(s.docs_multi_request);
  }
  return s;
}

}  // namespace boxche
