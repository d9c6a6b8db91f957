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

// Semi-experiments: randomizations that each destroy one correlation
// structure of a trace while preserving the rest.
//
// Every randomization draws per-document streams seeded from
// derive_seed(root, doc name), so output does not depend on the order in
// which documents are visited.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "boxche/lru.hpp"
#include "boxche/seed.hpp"
#include "boxche/trace.hpp"

namespace boxche {

enum class Randomization { kGlobal, kPositional, kLocal };

inline constexpr std::array<Randomization, 3> kAllRandomizations = {
    Randomization::kGlobal, Randomization::kPositional, Randomization::kLocal};

std::string_view to_string(Randomization kind);

// Each request gets an independent uniform timestamp in [0, A].
Trace randomize_global(const Trace& trace, Seed seed);

// Each document's requests are shifted jointly to U + t_i - t_1 with U
// uniform in [0, A - (t_k - t_1)].
Trace randomize_positional(const Trace& trace, Seed seed);

// First and last request of each document stay put; interior requests are
// redrawn uniformly on [t_1, t_k].
Trace randomize_local(const Trace& trace, Seed seed);

Trace randomize(const Trace& trace, Randomization kind, Seed seed);

// Seed handed to `kind` by run_semi_experiments for a given root.
Seed semi_experiment_seed(Seed root, Randomization kind) noexcept;

struct SemiExperimentReport {
  HitRatioCurve original;
  std::array<HitRatioCurve, 3> randomized;  // indexed like kAllRandomizations
  std::array<double, 3> mare_values{};

  const HitRatioCurve& curve(Randomization kind) const { return randomized[static_cast<int>(kind)]; }
  double mare_of(Randomization kind) const { return mare_values[static_cast<int>(kind)]; }
};

SemiExperimentReport run_semi_experiments(const Trace& trace, std::span<const std::uint64_t> sizes,
                                          Seed seed);

}  // namespace boxche
