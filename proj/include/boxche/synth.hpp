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

// Synthetic traces: the box-model Poisson cluster process and IRM, plus a
// Monte Carlo estimate of the distinct-document mean function.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxche/che_box.hpp"
#include "boxche/seed.hpp"
#include "boxche/trace.hpp"

namespace boxche {

// Document arriving at `arrival` (possibly before the window) with
// constant request intensity `lambda` on [arrival, arrival + tau].
struct DocumentProfile {
  double arrival = 0.0;
  double lambda = 0.0;
  double tau = 0.0;

  double mean_requests() const { return lambda * tau; }
};

struct GeneratorConfig {
  double gamma = 0.0;      // catalog arrivals per ms
  Millis window = 1;       // A
  std::vector<BoxPair> pairs;  // sampled uniformly with replacement; one entry = fixed pair
  std::optional<double> warmup;  // ms before 0; default: 99.9th percentile of tau

  double effective_warmup() const;
  // Throws std::invalid_argument on gamma < 0, window <= 0, an empty or
  // non-positive pair list, or negative warmup.
  void validate() const;
};

// {gamma, window_ms, warmup_ms?, pairs: [[lambda, tau], ...]}
GeneratorConfig parse_generator_config(std::istream& in);
GeneratorConfig read_generator_config(const std::string& path);
std::string generator_config_json(const GeneratorConfig& config);

// Draws the catalog (arrivals on [-warmup, A]) and every document's
// requests, keeping those in [0, A] after rounding half up to integer ms.
// Documents are named d<k> in arrival order among those with a retained
// request.
Trace generate_box_trace(const GeneratorConfig& config, Seed seed);

// Same draw, also returning each retained document's profile (indexed by
// DocId).
struct GeneratedTrace {
  Trace trace;
  std::vector<DocumentProfile> profiles;
};
GeneratedTrace generate_box_trace_with_profiles(const GeneratorConfig& config, Seed seed);

// `total_requests` i.i.d. draws proportional to `weights`, timestamps
// uniform on [0, A]. Document i is named d<i>.
Trace generate_irm_trace(std::span<const double> weights, std::uint64_t total_requests, Millis window,
                         Seed seed);

// w_i = i^-alpha, i = 1..count.
std::vector<double> zipf_weights(std::size_t count, double alpha);

struct PsiMonteCarloPoint {
  double t = 0.0;
  double mean = 0.0;        // distinct documents requested in [0, t]
  double stderr_mean = 0.0;
  double variance = 0.0;    // sample variance of that count
  double stderr_variance = 0.0;
  double multi_mean = 0.0;  // documents with >= 2 requests in [0, t]
  double multi_stderr = 0.0;
};

// Counts use the unrounded request times. Replication r uses derive_seed(seed, r). Requires reps >= 2 and every t
// within [0, config.window].
std::vector<PsiMonteCarloPoint> monte_carlo_psi(const GeneratorConfig& config,
                                                std::span<const double> t_grid, std::uint32_t reps,
                                                Seed seed);

}  // namespace boxche
