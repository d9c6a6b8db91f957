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

// LRU hit ratios for every cache size from one pass over the trace.
//
// A request's stack distance is the number of distinct documents requested
// since the previous request to the same document, the document itself
// included. At capacity C the request hits iff its distance is <= C.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "boxche/trace.hpp"

namespace boxche {

constexpr std::uint64_t kColdMiss = std::numeric_limits<std::uint64_t>::max();

struct StackDistanceProfile {
  // histogram[d] = requests at finite distance d; index 0 is unused.
  std::vector<std::uint64_t> histogram;
  std::uint64_t cold_misses = 0;  // first requests (infinite distance)
  std::uint64_t total_requests = 0;

  // Requests with distance <= capacity.
  std::uint64_t hits_at(std::uint64_t capacity) const;
};

struct CurvePoint {
  std::uint64_t cache_size = 0;
  double relative_size = 0.0;
  double hit_ratio = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct HitRatioCurve {
  std::vector<CurvePoint> points;
  std::uint64_t total_requests = 0;

  std::vector<std::uint64_t> sizes() const;
  friend bool operator==(const HitRatioCurve&, const HitRatioCurve&) = default;
};

// One entry per request, kColdMiss for first requests. O(M log M).
std::vector<std::uint64_t> stack_distance_sequence(const Trace& trace);

StackDistanceProfile stack_distances(const Trace& trace);

// Throws ModelError on an empty trace, std::invalid_argument on a grid
// that is not positive and strictly ascending.
HitRatioCurve hit_ratio_curve(const Trace& trace, std::span<const std::uint64_t> sizes);
HitRatioCurve hit_ratio_curve(const StackDistanceProfile& profile, std::uint64_t distinct_docs,
                              std::span<const std::uint64_t> sizes);

// Reference simulator: an explicit recency-ordered list of at most
// `capacity` documents. Returns the hit count.
std::uint64_t brute_force_lru(const Trace& trace, std::uint64_t capacity);

// Mean absolute relative error of `model` against `reference`.
double mare(const HitRatioCurve& reference, const HitRatioCurve& model);

// `cache_size,relative_size,hit_ratio`, 6 significant digits.
void write_curve_csv(std::ostream& out, const HitRatioCurve& curve);

}  // namespace boxche
