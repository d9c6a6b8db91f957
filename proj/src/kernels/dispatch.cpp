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

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxche/kernels.hpp"

namespace boxche::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(BOXCHE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("BOXCHE_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::kScalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::kAvx2;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

Isa& current() {
  static Isa isa = detect();
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  return isa == Isa::kScalar || cpu_has_avx2();
}

Isa active_isa() { return current(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("instruction set '" + std::string(to_string(isa)) + "' unavailable");
  }
  current() = isa;
}

void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out) {
  if (lambda.size() != tau.size() || out.size() != lambda.size()) {
    throw std::invalid_argument("box_terms: column length mismatch");
  }
#ifdef BOXCHE_HAVE_AVX2
  if (current() == Isa::kAvx2) return avx2::box_terms(term, t, lambda, tau, out);
#endif
  scalar::box_terms(term, t, lambda, tau, out);
}

void occupancy_terms(double t, std::span<const double> rate, std::span<double> out) {
  if (out.size() != rate.size()) throw std::invalid_argument("occupancy_terms: length mismatch");
#ifdef BOXCHE_HAVE_AVX2
  if (current() == Isa::kAvx2) return avx2::occupancy_terms(t, rate, out);
#endif
  scalar::occupancy_terms(t, rate, out);
}

double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kLeaf = 16;
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double box_mean(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau) {
  if (lambda.empty()) return 0.0;
  thread_local std::vector<double> scratch;
  scratch.resize(lambda.size());
  box_terms(term, t, lambda, tau, scratch);
  return pairwise_sum(scratch) / static_cast<double>(lambda.size());
}

#ifndef BOXCHE_HAVE_AVX2
namespace avx2 {
void box_terms(BoxTerm, double, std::span<const double>, std::span<const double>, std::span<double>) {
  throw std::logic_error("AVX2 kernels not built");
}
void occupancy_terms(double, std::span<const double>, std::span<double>) {
  throw std::logic_error("AVX2 kernels not built");
}
}  // namespace avx2
#endif

}  // namespace boxche::kernels
