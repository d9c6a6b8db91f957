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

#include "boxche/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "boxche/error.hpp"
#include "boxche/kernels.hpp"

namespace boxche {

namespace {

void require_multi(const DocObservation& obs) {
  if (obs.n < 2) {
    throw ModelError("lifespan/rate estimators need n >= 2 (document '" + obs.doc + "' has " +
                     std::to_string(obs.n) + ")");
  }
}

// x / (1 - e^-x), continuous at 0.
double truncation_ratio(double x) {
  if (x == 0.0) return 1.0;
  return x / kernels::one_minus_exp_neg(x);
}

}  // namespace

double estimate_lifespan(const DocObservation& obs) {
  require_multi(obs);
  const double n = static_cast<double>(obs.n);
  const double spread = static_cast<double>(obs.theta_last - obs.theta_first);
  return std::max(kMinLifespanMs, spread * (n + 1.0) / (n - 1.0));
}

double solve_n_prime(double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("solve_n_prime needs n >= 1");
  if (n == 1.0) return 0.0;
  double lo = 0.0, hi = n;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (truncation_ratio(mid) < n ? lo : hi) = mid;
  }
  // Pick whichever bracket end has the smaller residual.
  return std::abs(truncation_ratio(lo) - n) <= std::abs(truncation_ratio(hi) - n) ? lo : hi;
}

double estimate_rate(const DocObservation& obs) {
  return estimate_document(obs).lambda_hat;
}

DocEstimate estimate_document(const DocObservation& obs) {
  const double tau = estimate_lifespan(obs);
  return {tau, solve_n_prime(static_cast<double>(obs.n)) / tau};
}

CatalogRateEstimate estimate_catalog_rate(const TraceSummary& summary, Millis window) {
  if (window <= 0) throw ModelError("catalog rate needs a positive window");
  return {static_cast<double>(summary.distinct_docs) / static_cast<double>(window)};
}

std::vector<DocObservation> observe_documents(const Trace& trace) {
  std::vector<DocObservation> out;
  const auto act = doc_activity(trace);
  for (std::size_t d = 0; d < act.size(); ++d) {
    if (act[d].count == 0) continue;
    out.push_back({trace.doc_name(DocId{static_cast<std::uint32_t>(d)}), act[d].count, act[d].first,
                   act[d].last});
  }
  return out;
}

EmpiricalJointSample build_joint_sample(const Trace& trace, std::uint64_t min_requests) {
  EmpiricalJointSample s;
  s.window = trace.window().length;
  const auto threshold = std::max<std::uint64_t>(2, min_requests);
  // n' depends only on n; memoize the small counts that dominate real traces.
  std::vector<double> n_prime_cache;
  std::uint64_t multi_requests = 0;
  for (const auto& obs : observe_documents(trace)) {
    if (obs.n == 1) {
      ++s.n1;
      continue;
    }
    ++s.n2;
    multi_requests += obs.n;
    if (obs.n < threshold) continue;
    const double tau = estimate_lifespan(obs);
    double n_prime;
    if (obs.n < 4096) {
      if (n_prime_cache.size() <= obs.n) n_prime_cache.resize(obs.n + 1, -1.0);
      if (n_prime_cache[obs.n] < 0) n_prime_cache[obs.n] = solve_n_prime(static_cast<double>(obs.n));
      n_prime = n_prime_cache[obs.n];
    } else {
      n_prime = solve_n_prime(static_cast<double>(obs.n));
    }
    s.pairs.push_back(n_prime / tau, tau);
  }
  if (s.n2 > 0) s.mean_n_multi = static_cast<double>(multi_requests) / static_cast<double>(s.n2);
  return s;
}

std::vector<DocObservation> documents_by_popularity(const Trace& trace) {
  auto obs = observe_documents(trace);
  std::sort(obs.begin(), obs.end(), [](const DocObservation& a, const DocObservation& b) {
    return a.n != b.n ? a.n > b.n : a.doc < b.doc;
  });
  return obs;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> rank_frequency(const Trace& trace) {
  const auto obs = documents_by_popularity(trace);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) out.emplace_back(i + 1, obs[i].n);
  return out;
}

void write_estimates_csv(std::ostream& out, const Trace& trace, std::uint64_t min_requests) {
  out << "doc_id,n,theta_first_ms,theta_last_ms,tau_hat_ms,lambda_hat_per_ms\n";
  const auto threshold = std::max<std::uint64_t>(2, min_requests);
  char buf[128];
  for (const auto& obs : observe_documents(trace)) {
    if (obs.n < threshold) continue;
    const auto est = estimate_document(obs);
    std::snprintf(buf, sizeof buf, ",%llu,%lld,%lld,%.10g,%.10g\n",
                  static_cast<unsigned long long>(obs.n), static_cast<long long>(obs.theta_first),
                  static_cast<long long>(obs.theta_last), est.tau_hat, est.lambda_hat);
    out << obs.doc << buf;
  }
}

}  // namespace boxche
