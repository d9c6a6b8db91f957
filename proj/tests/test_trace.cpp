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

#include <random>

#include "boxche/error.hpp"
#include "boxche/trace.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace boxche;

TEST_CASE("parse_trace reads events and infers the window") {
  const auto t = parse_trace("timestamp_ms,doc_id\n0,a\n5,b");
  REQUIRE(t.size() == 2);
  CHECK(t.window().length == 5);
  CHECK(t.doc_name(t.events()[0].doc) == "a");
  CHECK(t.events()[1].timestamp == 5);
}

TEST_CASE("parse_trace sorts stably by timestamp") {
  const auto t = parse_trace("timestamp_ms,doc_id\n5,b\n0,a\n5,c\r\n");
  REQUIRE(t.size() == 3);
  CHECK(t.doc_name(t.events()[0].doc) == "a");
  CHECK(t.doc_name(t.events()[1].doc) == "b");
  CHECK(t.doc_name(t.events()[2].doc) == "c");
}

TEST_CASE("parse_trace errors") {
  SUBCASE("non-integer timestamp names the line") {
    try {
      parse_trace("timestamp_ms,doc_id\nxx,a");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("missing field") { CHECK_THROWS_AS(parse_trace("timestamp_ms,doc_id\n1"), ParseError); }
  SUBCASE("bad header") { CHECK_THROWS_AS(parse_trace("ts,doc\n1,a"), ParseError); }
  SUBCASE("timestamp past supplied window") {
    CHECK_THROWS_AS(parse_trace("timestamp_ms,doc_id\n0,a\n11,b", Millis{10}), RangeError);
  }
  SUBCASE("negative timestamp") { CHECK_THROWS_AS(parse_trace("timestamp_ms,doc_id\n-1,a"), ParseError); }
}

TEST_CASE("parse_trace handles user column and explicit window") {
  const auto t = parse_trace("timestamp_ms,doc_id,user_id\r\n3,a,u1\r\n1,b,\r\n", Millis{100});
  CHECK(t.window().length == 100);
  REQUIRE(t.size() == 2);
  CHECK_FALSE(t.events()[0].user.has_value());
  REQUIRE(t.events()[1].user.has_value());
  CHECK(t.user_name(*t.events()[1].user) == "u1");
}

TEST_CASE("parse after serialize is the identity on random traces") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = testing::random_trace(rng, 200, 30, 1000);
    const auto text = serialize_trace(t);
    const auto back = parse_trace(text, t.window().length);
    CHECK(serialize_trace(back) == text);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(back.events()[i].timestamp == t.events()[i].timestamp);
      CHECK(back.doc_name(back.events()[i].doc) == t.doc_name(t.events()[i].doc));
    }
  }
}

namespace {

Trace user_trace(std::initializer_list<std::tuple<Millis, const char*, const char*>> rows, Millis window) {
  Trace t{ObservationWindow{window}};
  std::vector<RequestEvent> ev;
  for (auto [ts, d, u] : rows) ev.push_back({ts, t.intern_doc(d), t.intern_user(u)});
  t.set_events(std::move(ev));
  return t;
}

}  // namespace

TEST_CASE("consolidate_sessions") {
  SUBCASE("gap under threshold collapses to the first request") {
    const auto t = consolidate_sessions(user_trace({{0, "a", "u"}, {300'000, "a", "u"}}, 1'000'000), 480'000);
    REQUIRE(t.size() == 1);
    CHECK(t.events()[0].timestamp == 0);
  }
  SUBCASE("gap over threshold keeps both") {
    const auto t = consolidate_sessions(user_trace({{0, "a", "u"}, {600'000, "a", "u"}}, 1'000'000));
    CHECK(t.size() == 2);
  }
  SUBCASE("single event unchanged") {
    const auto in = user_trace({{5, "a", "u"}}, 10);
    CHECK(consolidate_sessions(in) == in);
  }
  SUBCASE("runs chain on successive gaps; users and docs are separate keys") {
    const auto t = consolidate_sessions(user_trace({{0, "a", "u"},
                                                    {400'000, "a", "u"},
                                                    {800'000, "a", "u"},
                                                    {100'000, "a", "v"},
                                                    {200'000, "b", "u"}},
                                                   2'000'000));
    CHECK(t.size() == 3);
  }
  SUBCASE("missing user is an error") {
    const auto t = testing::trace_of({{0, "a"}}, 10);
    CHECK_THROWS_AS(consolidate_sessions(t), ModelError);
  }
  SUBCASE("idempotent on random traces") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Millis> when(0, 5'000'000);
    std::uniform_int_distribution<int> who(0, 3), what(0, 5);
    for (int rep = 0; rep < 20; ++rep) {
      Trace t{ObservationWindow{5'000'000}};
      std::vector<RequestEvent> ev;
      for (int i = 0; i < 300; ++i) {
        ev.push_back({when(rng), t.intern_doc("d" + std::to_string(what(rng))),
                      t.intern_user("u" + std::to_string(who(rng)))});
      }
      t.set_events(std::move(ev));
      const auto once = consolidate_sessions(t);
      CHECK(consolidate_sessions(once) == once);
    }
  }
}

TEST_CASE("extract_subtrace") {
  SUBCASE("full duration is the whole trace re-based") {
    const auto t = testing::trace_of({{3, "a"}, {7, "b"}, {10, "a"}}, 10);
    const auto s = extract_subtrace(t, 10);
    REQUIRE(s.size() == 3);
    CHECK(s.events()[0].timestamp == 0);
    CHECK(s.events()[2].timestamp == 7);
    CHECK(s.window().length == 10);
  }
  SUBCASE("densest window") {
    const auto t = testing::trace_of({{0, "a"}, {1, "b"}, {2, "c"}, {100, "d"}}, 100);
    const auto s = extract_subtrace(t, 10);
    REQUIRE(s.size() == 3);
    CHECK(s.doc_name(s.events()[2].doc) == "c");
  }
  SUBCASE("empty trace") {
    const Trace t{ObservationWindow{50}};
    CHECK(extract_subtrace(t, 20).empty());
  }
  SUBCASE("range errors") {
    const auto t = testing::trace_of({{0, "a"}}, 10);
    CHECK_THROWS_AS(extract_subtrace(t, 0), RangeError);
    CHECK_THROWS_AS(extract_subtrace(t, 11), RangeError);
  }
  SUBCASE("ties go to the earliest start") {
    const auto t = testing::trace_of({{0, "a"}, {1, "b"}, {50, "c"}, {51, "d"}}, 100);
    const auto s = extract_subtrace(t, 5);
    CHECK(s.doc_name(s.events()[0].doc) == "a");
  }
  SUBCASE("count is maximal over event-start windows (exhaustive scan)") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 50; ++rep) {
      const auto t = testing::random_trace(rng, 40, 8, 500);
      const Millis d = std::uniform_int_distribution<Millis>(1, 500)(rng);
      std::size_t best = 0;
      for (const auto& s : t.events()) {
        std::size_t n = 0;
        for (const auto& e : t.events()) n += (e.timestamp >= s.timestamp && e.timestamp <= s.timestamp + d);
        best = std::max(best, n);
      }
      CHECK(extract_subtrace(t, d).size() == best);
    }
  }
}

TEST_CASE("trace_stats") {
  const auto s = trace_stats(testing::trace_of({{0, "A"}, {1, "B"}, {2, "A"}}, 2));
  CHECK(s.distinct_docs == 2);
  CHECK(s.docs_single_request == 1);
  CHECK(s.docs_multi_request == 1);
  CHECK(s.mean_requests_multi == 2.0);

  CHECK(trace_stats(Trace{}) == TraceSummary{});

  const auto s3 = trace_stats(testing::trace_of({{0, "A"}, {1, "A"}, {2, "A"}}, 2));
  CHECK(s3.distinct_docs == 1);
  CHECK(s3.docs_single_request == 0);
  CHECK(s3.docs_multi_request == 1);
  CHECK(s3.mean_requests_multi == 3.0);
}
