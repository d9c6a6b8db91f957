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

#include "boxche/shuffle.hpp"

#include <random>
#include <vector>

#include "boxche/error.hpp"

namespace boxche {

namespace {

// Event indices grouped by document, each group in trace order.
std::vector<std::vector<std::size_t>> group_by_doc(const Trace& trace) {
  std::vector<std::vector<std::size_t>> groups(trace.doc_table_size());
  const auto& ev = trace.events();
  for (std::size_t i = 0; i < ev.size(); ++i) groups[index_of(ev[i].doc)].push_back(i);
  return groups;
}

Millis uniform_between(Rng& rng, Millis lo, Millis hi) {
  return std::uniform_int_distribution<Millis>(lo, hi)(rng);
}

template <typename PerDoc>
Trace rewrite_per_doc(const Trace& trace, Seed seed, PerDoc&& per_doc) {
  std::vector<RequestEvent> ev = trace.events();
  const auto groups = group_by_doc(trace);
  for (std::size_t d = 0; d < groups.size(); ++d) {
    if (groups[d].empty()) continue;
    Rng rng = make_rng(derive_seed(seed, trace.doc_name(DocId{static_cast<std::uint32_t>(d)})));
    per_doc(rng, groups[d], ev);
  }
  Trace out = trace.with_same_tables();
  out.set_events(std::move(ev));
  return out;
}

}  // namespace

std::string_view to_string(Randomization kind) {
  switch (kind) {
    case Randomization::kGlobal: return "global";
    case Randomization::kPositional: return "positional";
    case Randomization::kLocal: return "local";
  }
  return "?";
}

Trace randomize_global(const Trace& trace, Seed seed) {
  const Millis window = trace.window().length;
  return rewrite_per_doc(trace, seed, [&](Rng& rng, const std::vector<std::size_t>& idx,
                                          std::vector<RequestEvent>& ev) {
    for (auto i : idx) ev[i].timestamp = uniform_between(rng, 0, window);
  });
}

Trace randomize_positional(const Trace& trace, Seed seed) {
  const Millis window = trace.window().length;
  return rewrite_per_doc(trace, seed, [&](Rng& rng, const std::vector<std::size_t>& idx,
                                          std::vector<RequestEvent>& ev) {
    const Millis first = ev[idx.front()].timestamp;
    const Millis span = ev[idx.back()].timestamp - first;
    const Millis u = uniform_between(rng, 0, window - span);
    for (auto i : idx) ev[i].timestamp = u + ev[i].timestamp - first;
  });
}

Trace randomize_local(const Trace& trace, Seed seed) {
  return rewrite_per_doc(trace, seed, [](Rng& rng, const std::vector<std::size_t>& idx,
                                         std::vector<RequestEvent>& ev) {
    if (idx.size() <= 2) return;
    const Millis first = ev[idx.front()].timestamp;
    const Millis last = ev[idx.back()].timestamp;
    if (first == last) return;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) ev[idx[k]].timestamp = uniform_between(rng, first, last);
  });
}

Trace randomize(const Trace& trace, Randomization kind, Seed seed) {
  switch (kind) {
    case Randomization::kGlobal: return randomize_global(trace, seed);
    case Randomization::kPositional: return randomize_positional(trace, seed);
    case Randomization::kLocal: return randomize_local(trace, seed);
  }
  throw std::invalid_argument("unknown randomization");
}

Seed semi_experiment_seed(Seed root, Randomization kind) noexcept {
  return derive_seed(root, static_cast<std::uint64_t>(kind) + 1);
}

SemiExperimentReport run_semi_experiments(const Trace& trace, std::span<const std::uint64_t> sizes,
                                          Seed seed) {
  if (trace.empty()) throw ModelError("semi-experiments need a non-empty trace");
  SemiExperimentReport report;
  report.original = hit_ratio_curve(trace, sizes);
  for (auto kind : kAllRandomizations) {
    const auto k = static_cast<int>(kind);
    report.randomized[k] = hit_ratio_curve(randomize(trace, kind, semi_experiment_seed(seed, kind)), sizes);
    report.mare_values[k] = mare(report.original, report.randomized[k]);
  }
  return report;
}

}  // namespace boxche
