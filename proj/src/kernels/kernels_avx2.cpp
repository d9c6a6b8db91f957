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

// Built with -mavx2 -mfma; only reached through the runtime dispatcher.

#include <immintrin.h>

#include <cassert>

#include "boxche/kernels.hpp"
#include "series.hpp"

namespace boxche::kernels::avx2 {

namespace {

using detail::kTables;

template <std::size_t N>
inline __m256d horner(const std::array<double, N>& c, __m256d x) {
  __m256d acc = _mm256_set1_pd(c[0]);
  for (std::size_t i = 1; i < N; ++i) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(c[i]));
  return acc;
}

// e^-x for x >= 0. Range reduction x = k ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial; about 1 ulp against std::exp.
inline __m256d exp_neg(__m256d x) {
  const __m256d y = _mm256_sub_pd(_mm256_setzero_pd(), x);
  const __m256d y_clamped = _mm256_max_pd(y, _mm256_set1_pd(-708.0));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y_clamped, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), y_clamped);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  static constexpr double kInvFact[14] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(k32), _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(708.0), _CMP_GT_OQ);
  return _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
}

struct Helpers {
  __m256d e1, f, g, k;
};

// Evaluates E1, F, G and K at x (only those requested are meaningful).
template <bool kNeedE1, bool kNeedF, bool kNeedG, bool kNeedK>
inline Helpers helpers(__m256d x) {
  Helpers h{};
  const __m256d small = _mm256_cmp_pd(x, _mm256_set1_pd(kSeriesCutoff), _CMP_LT_OQ);
  const __m256d e = exp_neg(x);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d x2 = _mm256_mul_pd(x, x);
  if constexpr (kNeedE1) {
    const __m256d series = _mm256_mul_pd(x, horner(kTables.e1, x));
    h.e1 = _mm256_blendv_pd(_mm256_sub_pd(one, e), series, small);
  }
  if constexpr (kNeedF) {
    const __m256d series = _mm256_mul_pd(x2, horner(kTables.f, x));
    const __m256d closed = _mm256_add_pd(_mm256_sub_pd(x, one), e);
    h.f = _mm256_blendv_pd(closed, series, small);
  }
  if constexpr (kNeedG) {
    const __m256d series = _mm256_mul_pd(x2, horner(kTables.g, x));
    const __m256d closed = _mm256_sub_pd(_mm256_sub_pd(one, e), _mm256_mul_pd(x, e));
    h.g = _mm256_blendv_pd(closed, series, small);
  }
  if constexpr (kNeedK) {
    const __m256d series = _mm256_mul_pd(_mm256_mul_pd(x2, x), horner(kTables.k, x));
    const __m256d two_x = _mm256_add_pd(x, x);
    const __m256d closed = _mm256_add_pd(_mm256_sub_pd(two_x, _mm256_set1_pd(4.0)),
                                         _mm256_mul_pd(_mm256_add_pd(_mm256_set1_pd(4.0), two_x), e));
    h.k = _mm256_blendv_pd(closed, series, small);
  }
  return h;
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

template <BoxTerm kTerm>
void run(double t, const double* lambda, const double* tau, double* out, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lam = _mm256_loadu_pd(lambda + i);
    const __m256d ta = _mm256_loadu_pd(tau + i);
    const __m256d x = _mm256_mul_pd(lam, _mm256_min_pd(ta, tv));
    __m256d r;
    if constexpr (kTerm == BoxTerm::kPsi) {
      const auto h = helpers<true, true, false, false>(x);
      const __m256d gap = abs_pd(_mm256_sub_pd(ta, tv));
      r = _mm256_fmadd_pd(h.e1, gap, _mm256_div_pd(_mm256_add_pd(h.f, h.f), lam));
    } else if constexpr (kTerm == BoxTerm::kMulti) {
      const auto h = helpers<false, false, true, true>(x);
      const __m256d gap = abs_pd(_mm256_sub_pd(ta, tv));
      r = _mm256_fmadd_pd(h.g, gap, _mm256_div_pd(h.k, lam));
    } else {
      const auto h = helpers<true, true, false, false>(x);
      const __m256d excess = _mm256_max_pd(_mm256_sub_pd(ta, tv), _mm256_setzero_pd());
      r = _mm256_fmadd_pd(_mm256_mul_pd(lam, excess), h.e1, h.f);
    }
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    if constexpr (kTerm == BoxTerm::kPsi) out[i] = psi_term(lambda[i], tau[i], t);
    else if constexpr (kTerm == BoxTerm::kMulti) out[i] = multi_term(lambda[i], tau[i], t);
    else out[i] = hits_term(lambda[i], tau[i], t);
  }
}

}  // namespace

void box_terms(BoxTerm term, double t, std::span<const double> lambda, std::span<const double> tau,
               std::span<double> out) {
  assert(lambda.size() == tau.size() && out.size() == lambda.size());
  switch (term) {
    case BoxTerm::kPsi: return run<BoxTerm::kPsi>(t, lambda.data(), tau.data(), out.data(), out.size());
    case BoxTerm::kMulti: return run<BoxTerm::kMulti>(t, lambda.data(), tau.data(), out.data(), out.size());
    case BoxTerm::kHits: return run<BoxTerm::kHits>(t, lambda.data(), tau.data(), out.data(), out.size());
  }
}

void occupancy_terms(double t, std::span<const double> rate, std::span<double> out) {
  assert(out.size() == rate.size());
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= rate.size(); i += 4) {
    const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(rate.data() + i), tv);
    _mm256_storeu_pd(out.data() + i, helpers<true, false, false, false>(x).e1);
  }
  for (; i < rate.size(); ++i) out[i] = one_minus_exp_neg(rate[i] * t);
}

}  // namespace boxche::kernels::avx2
