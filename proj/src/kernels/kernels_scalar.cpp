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

#include <algorithm>
#include <cassert>
#include <cmath>

#include "boxche/kernels.hpp"
#include "series.hpp"

namespace boxche::kernels {

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double acc = c[0];
  for (std::size_t i = 1; i < N; ++i) acc = acc * x + c[i];
  return acc;
}

using detail::kTables;

}  // namespace

double one_minus_exp_neg(double x) {
  if (x < kSeriesCutoff) return x * horner(kTables.e1, x);
  return 1.0 - std::exp(-x);
}

double excess_exp(double x) {
  if (x < kSeriesCutoff) return x * x * horner(kTables.f, x);
  return x - 1.0 + std::exp(-x);
}

double two_or_more(double x) {
  if (x < kSeriesCutoff) return x * x * horner(kTables.g, x);
  const double e = std::exp(-x);
  return 1.0 - e - x * e;
}

double multi_kernel(double x) {
  if (x < kSeriesCutoff) return x * x * x * horner(kTables.k, x);
  return 2.0 * x - 4.0 + (4.0 + 2.0 * x) * std::exp(-x);
}

// Box-model identities, with m = min(tau, t) and x = lambda * m:
//   psi   = 2 F(x) / lambda + E1(x) |tau - t|
//   multi = K(x) / lambda   + G(x)  |tau - t|
//   hits  = F(x) + lambda (tau - t)^+ E1(x)
// These are the two-branch closed forms regrouped so that both branches
// share one expression and small lambda does not cancel.

double psi_term(double lambda, double tau, double t) {
  const double x = lambda * std::min(tau, t);
  return 2.0 * excess_exp(x) / lambda + one_minus_exp_neg(x) * std::abs(tau - t);
}

double multi_term(double lambda, double tau, double t) {
  const double x = lambda * std::min(tau, t);
  return multi_kernel(x) / lambda + two_or_more(x) * std::abs(tau - t);
}

double hits_term(double lambda, double tau, double t) {
  const double x = lambda * std::min(tau, t);
  return excess_exp(x) + lambda * std::max(tau - t, 0.0) * one_minus_exp_neg(x);
}

namespace scalar {

void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out) {
  assert(lambda.size() == tau.size() && out.size() == lambda.size());
  const std::size_t n = lambda.size();
  switch (term) {
    case BoxTerm::kPsi:
      for (std::size_t i = 0; i < n; ++i) out[i] = psi_term(lambda[i], tau[i], t);
      break;
    case BoxTerm::kMulti:
      for (std::size_t i = 0; i < n; ++i) out[i] = multi_term(lambda[i], tau[i], t);
      break;
    case BoxTerm::kHits:
      for (std::size_t i = 0; i < n; ++i) out[i] = hits_term(lambda[i], tau[i], t);
      break;
  }
}

void occupancy_terms(double t, std::span<const double> rate, std::span<double> out) {
  assert(out.size() == rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) out[i] = one_minus_exp_neg(rate[i] * t);
}

}  // namespace scalar
}  // namespace boxche::kernels
