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

// Che-approximation hit ratios for LRU under the box model, where each
// document receives Poisson requests at rate lambda during a lifespan tau
// after arriving in a Poisson catalog of rate gamma. Also the classic
// Che approximation for a static IRM catalog, as a baseline.
//
// Expectations over (lambda, tau) are means over the empirical pairs.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boxche/estimators.hpp"
#include "boxche/lru.hpp"

namespace boxche {

struct BoxPair {
  double lambda = 0.0;
  double tau = 0.0;
};

struct PsiModel {
  double gamma_hat = 0.0;
  EmpiricalJointSample sample;
};

struct CharacteristicTime {
  double t_c = 0.0;
  double cache_size = 0.0;
  double residual = 0.0;  // |psi(t_c) - C|
};

struct ChePrediction {
  HitRatioCurve curve;
  std::vector<CharacteristicTime> times;  // one per grid point
  std::vector<std::string> warnings;
};

// Mean number of distinct documents requested in a window of length t.
double psi_box(double t, double gamma, const BoxPairs& pairs);
double psi_box(double t, double gamma, std::span<const BoxPair> pairs);

// Single-request ("noise") documents as a homogeneous Poisson stream.
double psi1(double t, std::uint64_t n1, Millis window);

// Per-pair contribution of the multi-request class: expected number of
// documents of this (lambda, tau) with at least two requests in [0, t],
// per unit catalog rate.
double big_l(double lambda, double tau, double t);

// psi1 + gamma_hat * mean(big_l).
double psi_hat(double t, const PsiModel& model);

// Solves psi(t) = C: doubles an upper bound from `initial_upper` until it
// brackets C, then bisects to |psi(t) - C| <= 1e-6 C. Throws ModelError
// ("cache larger than reachable catalog") if psi never reaches C.
CharacteristicTime characteristic_time(double cache_size, const std::function<double(double)>& psi,
                                       double initial_upper = 1.0);

double expected_hits_doc(BoxPair pair, double t_c);
double expected_hits_total(const BoxPairs& pairs, double t_c);

// Throws ModelError("no estimable documents") when n2 == 0 or the sample
// has no pairs.
double hit_ratio_box(const EmpiricalJointSample& sample, double gamma_hat, double cache_size);
ChePrediction predict_box_curve(const EmpiricalJointSample& sample, double gamma_hat,
                                std::span<const std::uint64_t> sizes, std::uint64_t distinct_docs);

// Classic Che under IRM with lambda_d = n_d / A. Sizes at or above the
// number of documents are clamped to the cold-miss ceiling 1 - m / sum n.
ChePrediction che_classic_irm(std::span<const std::uint64_t> doc_counts, Millis window,
                              std::span<const std::uint64_t> sizes);

}  // namespace boxche
