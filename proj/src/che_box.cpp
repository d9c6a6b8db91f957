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

#include "boxche/che_box.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "boxche/error.hpp"
#include "boxche/kernels.hpp"

namespace boxche {

namespace {

constexpr double kResidualTolerance = 1e-6;
constexpr long kMaxGrowthSteps = 1'000'000;

void require_estimable(const EmpiricalJointSample& sample) {
  if (sample.n2 == 0 || sample.pairs.empty()) throw ModelError("no estimable documents");
}

}  // namespace

double psi_box(double t, double gamma, const BoxPairs& pairs) {
  if (t <= 0.0 || pairs.empty()) return 0.0;
  return gamma * kernels::box_mean(kernels::BoxTerm::kPsi, t, pairs.lambda, pairs.tau);
}

double psi_box(double t, double gamma, std::span<const BoxPair> pairs) {
  BoxPairs cols;
  for (const auto& p : pairs) cols.push_back(p.lambda, p.tau);
  return psi_box(t, gamma, cols);
}

double psi1(double t, std::uint64_t n1, Millis window) {
  return static_cast<double>(n1) * t / static_cast<double>(window);
}

double big_l(double lambda, double tau, double t) {
  if (t <= 0.0) return 0.0;
  return kernels::multi_term(lambda, tau, t);
}

double psi_hat(double t, const PsiModel& model) {
  if (t <= 0.0) return 0.0;
  const auto& s = model.sample;
  double multi = 0.0;
  if (!s.pairs.empty()) {
    multi = model.gamma_hat * kernels::box_mean(kernels::BoxTerm::kMulti, t, s.pairs.lambda, s.pairs.tau);
  }
  return psi1(t, s.n1, s.window) + multi;
}

CharacteristicTime characteristic_time(double cache_size, const std::function<double(double)>& psi,
                                       double initial_upper) {
  if (!(cache_size > 0)) throw std::invalid_argument("cache size must be positive");
  if (!(initial_upper > 0)) initial_upper = 1.0;
  const double tol = kResidualTolerance * cache_size;

  double lo = 0.0, hi = initial_upper;
  double psi_hi = psi(hi);
  for (long step = 0; psi_hi < cache_size; ++step) {
    lo = hi;
    hi *= 2.0;
    if (step >= kMaxGrowthSteps || !std::isfinite(hi)) {
      throw ModelError("cache larger than reachable catalog (C = " + std::to_string(cache_size) + ")");
    }
    psi_hi = psi(hi);
  }
  if (std::abs(psi_hi - cache_size) <= tol) return {hi, cache_size, std::abs(psi_hi - cache_size)};

  CharacteristicTime best{hi, cache_size, std::abs(psi_hi - cache_size)};
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = psi(mid);
    const double r = std::abs(v - cache_size);
    if (r < best.residual) best = {mid, cache_size, r};
    if (r <= tol) break;
    (v < cache_size ? lo : hi) = mid;
  }
  return best;
}

double expected_hits_doc(BoxPair pair, double t_c) {
  if (t_c <= 0.0) return 0.0;
  return kernels::hits_term(pair.lambda, pair.tau, t_c);
}

double expected_hits_total(const BoxPairs& pairs, double t_c) {
  if (pairs.empty()) throw ModelError("expected hits over an empty sample");
  if (t_c <= 0.0) return 0.0;
  return kernels::box_mean(kernels::BoxTerm::kHits, t_c, pairs.lambda, pairs.tau);
}

namespace {

double box_ratio_at(const EmpiricalJointSample& sample, double t_c) {
  const double denom = sample.mean_n_multi + static_cast<double>(sample.n1) / static_cast<double>(sample.n2);
  return expected_hits_total(sample.pairs, t_c) / denom;
}

}  // namespace

double hit_ratio_box(const EmpiricalJointSample& sample, double gamma_hat, double cache_size) {
  require_estimable(sample);
  const PsiModel model{gamma_hat, sample};
  const auto tc = characteristic_time(
      cache_size, [&](double t) { return psi_hat(t, model); }, static_cast<double>(sample.window));
  return box_ratio_at(sample, tc.t_c);
}

ChePrediction predict_box_curve(const EmpiricalJointSample& sample, double gamma_hat,
                                std::span<const std::uint64_t> sizes, std::uint64_t distinct_docs) {
  require_estimable(sample);
  ChePrediction out;
  const PsiModel model{gamma_hat, sample};
  auto psi = [&](double t) { return psi_hat(t, model); };
  const auto n_total = static_cast<double>(sample.n1) + sample.mean_n_multi * static_cast<double>(sample.n2);
  out.curve.total_requests = static_cast<std::uint64_t>(std::llround(n_total));
  const double observed = static_cast<double>(sample.n1 + sample.n2);
  if (const double at_window = psi(static_cast<double>(sample.window)); at_window > observed * (1.0 + 1e-9)) {
    out.warnings.push_back("estimated distinct-document mean over the window (" + std::to_string(at_window) +
                           ") exceeds the observed catalog (" + std::to_string(sample.n1 + sample.n2) +
                           "); lifespan/rate estimates are biased");
  }
  for (auto c : sizes) {
    const auto tc = characteristic_time(static_cast<double>(c), psi, static_cast<double>(sample.window));
    out.times.push_back(tc);
    out.curve.points.push_back(
        {c, distinct_docs ? static_cast<double>(c) / static_cast<double>(distinct_docs) : 0.0,
         box_ratio_at(sample, tc.t_c)});
  }
  return out;
}

ChePrediction che_classic_irm(std::span<const std::uint64_t> doc_counts, Millis window,
                              std::span<const std::uint64_t> sizes) {
  if (window <= 0) throw std::invalid_argument("classic Che needs a positive window");
  std::vector<double> rate, weight;
  rate.reserve(doc_counts.size());
  weight.reserve(doc_counts.size());
  for (auto n : doc_counts) {
    if (n == 0) throw std::invalid_argument("classic Che needs positive per-document counts");
    rate.push_back(static_cast<double>(n) / static_cast<double>(window));
    weight.push_back(static_cast<double>(n));
  }
  if (rate.empty()) throw ModelError("classic Che needs at least one document");
  const double m = static_cast<double>(rate.size());
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<double> occ(rate.size()), weighted(rate.size());
  auto occupancy = [&](double t) {
    kernels::occupancy_terms(t, rate, occ);
    return kernels::pairwise_sum(occ);
  };

  ChePrediction out;
  out.curve.total_requests = static_cast<std::uint64_t>(total);
  for (auto c : sizes) {
    const double cd = static_cast<double>(c);
    CurvePoint p{c, cd / m, 0.0};
    if (cd >= m) {
      p.hit_ratio = 1.0 - m / total;
      out.times.push_back({std::numeric_limits<double>::infinity(), cd, 0.0});
      out.warnings.push_back("cache size " + std::to_string(c) + " >= catalog size " +
                             std::to_string(rate.size()) + "; hit ratio clamped to cold-miss ceiling");
    } else {
      const auto tc = characteristic_time(cd, occupancy, static_cast<double>(window));
      kernels::occupancy_terms(tc.t_c, rate, occ);
      for (std::size_t i = 0; i < occ.size(); ++i) weighted[i] = weight[i] * occ[i];
      p.hit_ratio = kernels::pairwise_sum(weighted) / total;
      out.times.push_back(tc);
    }
    out.curve.points.push_back(p);
  }
  return out;
}

}  // namespace boxche
