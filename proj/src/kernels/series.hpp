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

// Power-series coefficients shared by the scalar and SIMD kernels,
// highest degree first for Horner evaluation. Each polynomial is divided
// by the lowest power of x it contains (see the *_shift constants).

#include <array>

namespace boxche::kernels::detail {

inline constexpr int kSeriesTerms = 18;

// E1(x) = sum_{k>=1} (-1)^{k+1} x^k / k!        = x * P(x)
// F(x)  = sum_{k>=2} (-1)^k x^k / k!            = x^2 * P(x)
// G(x)  = sum_{k>=2} (-1)^k (k-1) x^k / k!      = x^2 * P(x)
// K(x)  = sum_{k>=3} (-1)^k (4-2k) x^k / k!     = x^3 * P(x)
struct SeriesTables {
  std::array<double, kSeriesTerms> e1{}, f{}, g{}, k{};
};

constexpr SeriesTables make_tables() {
  SeriesTables t;
  double fact[kSeriesTerms + 4] = {1.0};
  for (int i = 1; i < kSeriesTerms + 4; ++i) fact[i] = fact[i - 1] * i;
  for (int j = 0; j < kSeriesTerms; ++j) {
    const int out = kSeriesTerms - 1 - j;  // Horner order
    {
      const int k = j + 1;
      t.e1[out] = ((k + 1) % 2 == 0 ? 1.0 : -1.0) / fact[k];
    }
    {
      const int k = j + 2;
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      t.f[out] = sign / fact[k];
      t.g[out] = sign * (k - 1) / fact[k];
    }
    {
      const int k = j + 3;
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      t.k[out] = sign * (4 - 2 * k) / fact[k];
    }
  }
  return t;
}

inline constexpr SeriesTables kTables = make_tables();

}  // namespace boxche::kernels::detail
