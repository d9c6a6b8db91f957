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

#include <cstdint>
#include <random>
#include <string_view>

namespace boxche {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// FNV-1a; stable across platforms and runs, unlike std::hash.
std::uint64_t stable_hash(std::string_view s) noexcept;

// Child seed for an independent stream keyed by `key`.
Seed derive_seed(Seed root, std::uint64_t key) noexcept;
Seed derive_seed(Seed root, std::string_view key) noexcept;

using Rng = std::mt19937_64;

inline Rng make_rng(Seed seed) { return Rng(seed.value); }

}  // namespace boxche
