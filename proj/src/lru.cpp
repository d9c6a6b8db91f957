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

#include "boxche/lru.hpp"

#include <cmath>
#include <cstdio>
#include <list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "boxche/error.hpp"

namespace boxche {

namespace {

// Fenwick tree over request positions; a 1 marks the latest request of
// some document.
class PrefixCounter {
 public:
  explicit PrefixCounter(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t pos, int delta) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  // Sum over positions [0, pos).
  std::int64_t prefix(std::size_t pos) const {
    std::int64_t s = 0;
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

void check_grid(std::span<const std::uint64_t> sizes) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw std::invalid_argument("cache sizes must be positive");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("cache sizes must be strictly ascending");
    }
  }
}

}  // namespace

std::uint64_t StackDistanceProfile::hits_at(std::uint64_t capacity) const {
  std::uint64_t hits = 0;
  const auto top = std::min<std::uint64_t>(capacity, histogram.empty() ? 0 : histogram.size() - 1);
  for (std::uint64_t d = 1; d <= top; ++d) hits += histogram[d];
  return hits;
}

std::vector<std::uint64_t> HitRatioCurve::sizes() const {
  std::vector<std::uint64_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.cache_size);
  return out;
}

std::vector<std::uint64_t> stack_distance_sequence(const Trace& trace) {
  const auto& ev = trace.events();
  std::vector<std::uint64_t> out(ev.size(), kColdMiss);
  constexpr std::size_t kNever = static_cast<std::size_t>(-1);
  std::vector<std::size_t> last(trace.doc_table_size(), kNever);
  PrefixCounter marks(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    auto& prev = last[index_of(ev[i].doc)];
    if (prev != kNever) {
      const auto between = marks.prefix(i) - marks.prefix(prev + 1);
      out[i] = static_cast<std::uint64_t>(between) + 1;
      marks.add(prev, -1);
    }
    marks.add(i, +1);
    prev = i;
  }
  return out;
}

StackDistanceProfile stack_distances(const Trace& trace) {
  StackDistanceProfile p;
  p.total_requests = trace.size();
  p.histogram.assign(1, 0);
  for (auto d : stack_distance_sequence(trace)) {
    if (d == kColdMiss) {
      ++p.cold_misses;
      continue;
    }
    if (d >= p.histogram.size()) p.histogram.resize(d + 1, 0);
    ++p.histogram[d];
  }
  return p;
}

HitRatioCurve hit_ratio_curve(const StackDistanceProfile& profile, std::uint64_t distinct_docs,
                              std::span<const std::uint64_t> sizes) {
  if (profile.total_requests == 0) throw ModelError("hit ratio undefined on an empty trace");
  check_grid(sizes);
  HitRatioCurve curve;
  curve.total_requests = profile.total_requests;
  // Cumulative walk: the grid is ascending.
  std::uint64_t hits = 0, d = 1;
  const auto total = static_cast<double>(profile.total_requests);
  for (auto c : sizes) {
    while (d < profile.histogram.size() && d <= c) hits += profile.histogram[d++];
    curve.points.push_back({c,
                            distinct_docs > 0 ? static_cast<double>(c) / static_cast<double>(distinct_docs) : 0.0,
                            static_cast<double>(hits) / total});
  }
  return curve;
}

HitRatioCurve hit_ratio_curve(const Trace& trace, std::span<const std::uint64_t> sizes) {
  if (trace.empty()) throw ModelError("hit ratio undefined on an empty trace");
  return hit_ratio_curve(stack_distances(trace), trace_stats(trace).distinct_docs, sizes);
}

std::uint64_t brute_force_lru(const Trace& trace, std::uint64_t capacity) {
  if (capacity == 0) throw std::invalid_argument("capacity must be at least 1");
  std::list<std::uint32_t> recency;  // front = most recently used
  std::unordered_map<std::uint32_t, std::list<std::uint32_t>::iterator> where;
  std::uint64_t hits = 0;
  for (const auto& e : trace.events()) {
    const auto doc = index_of(e.doc);
    if (auto it = where.find(doc); it != where.end()) {
      ++hits;
      recency.splice(recency.begin(), recency, it->second);
      continue;
    }
    if (recency.size() == capacity) {
      where.erase(recency.back());
      recency.pop_back();
    }
    recency.push_front(doc);
    where[doc] = recency.begin();
  }
  return hits;
}

double mare(const HitRatioCurve& reference, const HitRatioCurve& model) {
  if (reference.points.size() != model.points.size()) {
    throw std::invalid_argument("MARE needs curves on the same grid (length mismatch)");
  }
  if (reference.points.empty()) throw std::invalid_argument("MARE of empty curves");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.points.size(); ++i) {
    const auto& x = reference.points[i];
    const auto& y = model.points[i];
    if (x.cache_size != y.cache_size) {
      throw std::invalid_argument("MARE needs curves on the same grid (size " +
                                  std::to_string(x.cache_size) + " vs " +
                                  std::to_string(y.cache_size) + ")");
    }
    if (x.hit_ratio == 0.0) {
      throw ModelError("reference hit ratio is zero at cache size " + std::to_string(x.cache_size));
    }
    acc += std::abs(x.hit_ratio - y.hit_ratio) / std::abs(x.hit_ratio);
  }
  return acc / static_cast<double>(reference.points.size());
}

void write_curve_csv(std::ostream& out, const HitRatioCurve& curve) {
  out << "cache_size,relative_size,hit_ratio\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%llu,%.6g,%.6g\n", static_cast<unsigned long long>(p.cache_size),
                  p.relative_size, p.hit_ratio);
    out << buf;
  }
}

}  // namespace boxche
