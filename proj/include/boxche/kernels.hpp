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

// Data-parallel inner loops of the analytic model: per-pair box-model
// terms over columns of (lambda, tau), and IRM occupancy terms.
//
// Each kernel has a scalar reference and, on x86-64, an AVX2/FMA variant.
// The variant is chosen once at runtime from CPUID and can be forced
// with BOXCHE_SIMD=scalar|avx2 or set_active_isa(). Reductions go through
// pairwise_sum() after the terms are materialized, so the summation order
// is identical for every variant.
//
// All terms are written in terms of x = lambda * min(tau, t) and
// |tau - t|, with these helpers (series below kSeriesCutoff):
//   E1(x) = 1 - e^-x
//   F(x)  = x - 1 + e^-x
//   G(x)  = 1 - e^-x - x e^-x
//   K(x)  = 2x E1(x) - 4 G(x)

#include <span>
#include <string_view>

namespace boxche::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
// Throws std::invalid_argument if the CPU (or build) lacks `isa`.
void set_active_isa(Isa isa);

enum class BoxTerm {
  kPsi,   // distinct documents seen in [0, t] (per unit catalog rate)
  kMulti, // documents with >= 2 requests in [0, t]
  kHits,  // expected LRU hits at characteristic time t
};

inline constexpr double kSeriesCutoff = 0.5;

double one_minus_exp_neg(double x);  // E1
double excess_exp(double x);         // F
double two_or_more(double x);        // G
double multi_kernel(double x);       // K

// Scalar per-pair terms.
double psi_term(double lambda, double tau, double t);
double multi_term(double lambda, double tau, double t);
double hits_term(double lambda, double tau, double t);

// out[i] = term(lambda[i], tau[i], t). Spans must have equal length.
void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out);

// out[i] = 1 - exp(-rate[i] * t).
void occupancy_terms(double t, std::span<const double> rate, std::span<double> out);

// Fixed-shape pairwise summation.
double pairwise_sum(std::span<const double> values);

// pairwise_sum(box_terms(...)) / n; 0 for empty input.
double box_mean(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau);

namespace scalar {
void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out);
void occupancy_terms(double t, std::span<const double> rate, std::span<double> out);
}  // namespace scalar

namespace avx2 {
// Only callable when isa_supported(Isa::kAvx2).
void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out);
void occupancy_terms(double t, std::span<const double> rate, std::span<double> out);
}  // namespace avx2

}  // namespace boxche::kernels
