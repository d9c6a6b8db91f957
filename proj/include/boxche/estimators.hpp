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

// Per-document lifespan and request-rate estimates, and the empirical
// (lambda, tau) sample that parameterizes the box model.
//
// For a document with n >= 2 requests, first at t_I and last at t_F:
//   tau_hat    = (t_F - t_I) (n + 1) / (n - 1),  clamped below at 1 ms
//   lambda_hat = n' / tau_hat,  where n' / (1 - e^-n') = n
// The n' correction accounts for only observing documents with n >= 1
// under a Poisson(lambda tau) count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "boxche/trace.hpp"

namespace boxche {

struct DocObservation {
  std::string doc;
  std::uint64_t n = 0;
  Millis theta_first = 0;
  Millis theta_last = 0;
};

struct DocEstimate {
  double tau_hat = 0.0;     // ms
  double lambda_hat = 0.0;  // requests per ms
};

// Columnar (lambda, tau) pairs.
struct BoxPairs {
  std::vector<double> lambda;
  std::vector<double> tau;

  std::size_t size() const noexcept { return lambda.size(); }
  bool empty() const noexcept { return lambda.empty(); }
  void push_back(double l, double t) {
    lambda.push_back(l);
    tau.push_back(t);
  }
};

struct EmpiricalJointSample {
  BoxPairs pairs;
  std::uint64_t n1 = 0;         // single-request documents
  std::uint64_t n2 = 0;         // multi-request documents
  double mean_n_multi = 0.0;    // E[n | n >= 2]
  Millis window = 1;            // A
};

struct CatalogRateEstimate {
  double gamma_hat = 0.0;  // documents per ms
};

inline constexpr double kMinLifespanMs = 1.0;

// Throws ModelError when n < 2.
double estimate_lifespan(const DocObservation& obs);
double estimate_rate(const DocObservation& obs);
DocEstimate estimate_document(const DocObservation& obs);

// Root of x / (1 - e^-x) = n on [0, n]; 0 for n = 1. Throws
// std::invalid_argument when n < 1.
double solve_n_prime(double n);

CatalogRateEstimate estimate_catalog_rate(const TraceSummary& summary, Millis window);

// Observations for every document present in the trace, in DocId order.
std::vector<DocObservation> observe_documents(const Trace& trace);

// Pairs come from documents with n >= max(2, min_requests); n1, n2 and
// mean_n_multi always describe the full n >= 1 population.
EmpiricalJointSample build_joint_sample(const Trace& trace, std::uint64_t min_requests = 2);

// Observations sorted by request count descending, ties by document name.
std::vector<DocObservation> documents_by_popularity(const Trace& trace);

// (rank, request count), counts descending, ties by document name.
std::vector<std::pair<std::uint64_t, std::uint64_t>> rank_frequency(const Trace& trace);

// `doc_id,n,theta_first_ms,theta_last_ms,tau_hat_ms,lambda_hat_per_ms`;
// documents with n < min_requests are skipped.
void write_estimates_csv(std::ostream& out, const Trace& trace, std::uint64_t min_requests = 2);

}  // namespace boxche
