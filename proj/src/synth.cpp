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

#include "boxche/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace boxche {

double GeneratorConfig::effective_warmup() const {
  if (warmup) return *warmup;
  if (pairs.empty()) return 0.0;
  std::vector<double> taus;
  taus.reserve(pairs.size());
  for (const auto& p : pairs) taus.push_back(p.tau);
  std::sort(taus.begin(), taus.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.999 * static_cast<double>(taus.size())));
  return taus[std::max<std::size_t>(rank, 1) - 1];
}

void GeneratorConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (window <= 0) throw std::invalid_argument("window must be positive");
  if (pairs.empty()) throw std::invalid_argument("generator needs at least one (lambda, tau) pair");
  for (const auto& p : pairs) {
    if (!(p.lambda >= 0.0) || !(p.tau > 0.0) || !std::isfinite(p.lambda) || !std::isfinite(p.tau)) {
      throw std::invalid_argument("pairs need lambda >= 0 and tau > 0");
    }
  }
  if (warmup && !(*warmup >= 0.0)) throw std::invalid_argument("warmup must be >= 0");
}

GeneratorConfig parse_generator_config(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("generator config is not valid JSON: ") + e.what());
  }
  GeneratorConfig c;
  try {
    c.gamma = j.at("gamma").get<double>();
    c.window = j.at("window_ms").get<Millis>();
    if (j.contains("warmup_ms") && !j["warmup_ms"].is_null()) c.warmup = j["warmup_ms"].get<double>();
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument("each pair must be [lambda, tau]");
      c.pairs.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad generator config: ") + e.what());
  }
  c.validate();
  return c;
}

GeneratorConfig read_generator_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_generator_config(in);
}

std::string generator_config_json(const GeneratorConfig& config) {
  nlohmann::json j;
  j["gamma"] = config.gamma;
  j["window_ms"] = config.window;
  j["warmup_ms"] = config.effective_warmup();
  auto pairs = nlohmann::json::array();
  for (const auto& p : config.pairs) pairs.push_back({p.lambda, p.tau});
  j["pairs"] = pairs;
  return j.dump();
}

namespace {

Millis round_half_up(double x) { return static_cast<Millis>(std::floor(x + 0.5)); }

struct RawRequest {
  Millis timestamp;
  double time;  // before rounding
  std::uint32_t doc;  // catalog index
};

// Catalog and requests in [0, A]; catalog indices in arrival order.
void draw_catalog(const GeneratorConfig& config, Rng& rng, std::vector<DocumentProfile>& catalog,
                  std::vector<RawRequest>& requests) {
  const double warmup = config.effective_warmup();
  const double span = static_cast<double>(config.window) + warmup;
  const auto count = std::poisson_distribution<std::uint64_t>(config.gamma * span)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> arrivals(count);
  for (auto& a : arrivals) a = -warmup + span * unit(rng);
  std::sort(arrivals.begin(), arrivals.end());

  std::uniform_int_distribution<std::size_t> pick(0, config.pairs.size() - 1);
  catalog.clear();
  requests.clear();
  for (double a : arrivals) {
    const auto& pair = config.pairs.size() == 1 ? config.pairs.front() : config.pairs[pick(rng)];
    const auto doc = static_cast<std::uint32_t>(catalog.size());
    catalog.push_back({a, pair.lambda, pair.tau});
    const double mean = pair.lambda * pair.tau;
    const auto n = mean > 0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const double raw = a + pair.tau * unit(rng);
      const Millis ts = round_half_up(raw);
      if (ts >= 0 && ts <= config.window) requests.push_back({ts, raw, doc});
    }
  }
}

}  // namespace

GeneratedTrace generate_box_trace_with_profiles(const GeneratorConfig& config, Seed seed) {
  config.validate();
  Rng rng = make_rng(seed);
  std::vector<DocumentProfile> catalog;
  std::vector<RawRequest> requests;
  if (config.gamma > 0) draw_catalog(config, rng, catalog, requests);

  GeneratedTrace out{Trace(ObservationWindow{config.window}), {}};
  // Name documents in arrival order among those with requests.
  std::vector<bool> seen(catalog.size(), false);
  for (const auto& r : requests) seen[r.doc] = true;
  std::vector<std::uint32_t> doc_of(catalog.size(), 0);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (!seen[i]) continue;
    doc_of[i] = index_of(out.trace.intern_doc("d" + std::to_string(out.profiles.size())));
    out.profiles.push_back(catalog[i]);
  }
  std::vector<RequestEvent> events;
  events.reserve(requests.size());
  for (const auto& r : requests) events.push_back({r.timestamp, DocId{doc_of[r.doc]}, std::nullopt});
  out.trace.set_events(std::move(events));
  return out;
}

Trace generate_box_trace(const GeneratorConfig& config, Seed seed) {
  return generate_box_trace_with_profiles(config, seed).trace;
}

Trace generate_irm_trace(std::span<const double> weights, std::uint64_t total_requests, Millis window,
                         Seed seed) {
  if (window <= 0) throw std::invalid_argument("window must be positive");
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("IRM weights must be positive");
  }
  Trace trace{ObservationWindow{window}};
  for (std::size_t i = 0; i < weights.size(); ++i) trace.intern_doc("d" + std::to_string(i));
  if (total_requests == 0) return trace;
  if (weights.empty()) throw std::invalid_argument("IRM needs at least one document");

  Rng rng = make_rng(seed);
  std::discrete_distribution<std::uint32_t> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<Millis> when(0, window);
  std::vector<RequestEvent> events(total_requests);
  for (auto& e : events) {
    e.doc = DocId{pick(rng)};
    e.timestamp = when(rng);
  }
  trace.set_events(std::move(events));
  return trace;
}

std::vector<double> zipf_weights(std::size_t count, double alpha) {
  std::vector<double> w(count);
  for (std::size_t i = 0; i < count; ++i) w[i] = std::pow(static_cast<double>(i + 1), -alpha);
  return w;
}

std::vector<PsiMonteCarloPoint> monte_carlo_psi(const GeneratorConfig& config,
                                                std::span<const double> t_grid, std::uint32_t reps,
                                                Seed seed) {
  config.validate();
  if (reps < 2) throw std::invalid_argument("monte_carlo_psi needs reps >= 2");
  for (double t : t_grid) {
    if (t < 0 || t > static_cast<double>(config.window)) {
      throw std::invalid_argument("t grid must lie within [0, window]");
    }
  }
  const std::size_t nt = t_grid.size();
  std::vector<std::vector<double>> distinct(nt, std::vector<double>(reps));
  std::vector<std::vector<double>> multi(nt, std::vector<double>(reps));

  std::vector<DocumentProfile> catalog;
  std::vector<RawRequest> requests;
  std::vector<double> first, second;
  for (std::uint32_t r = 0; r < reps; ++r) {
    Rng rng = make_rng(derive_seed(seed, r));
    if (config.gamma > 0) {
      draw_catalog(config, rng, catalog, requests);
    } else {
      catalog.clear();
      requests.clear();
    }
    // Earliest and second-earliest request per document.
    constexpr double kNone = std::numeric_limits<double>::infinity();
    first.assign(catalog.size(), kNone);
    second.assign(catalog.size(), kNone);
    for (const auto& q : requests) {
      if (q.time < 0) continue;
      double& f = first[q.doc];
      double& s = second[q.doc];
      if (q.time < f) {
        s = f;
        f = q.time;
      } else if (q.time < s) {
        s = q.time;
      }
    }
    std::vector<double> f_sorted, s_sorted;
    for (auto v : first)
      if (v != kNone) f_sorted.push_back(v);
    for (auto v : second)
      if (v != kNone) s_sorted.push_back(v);
    std::sort(f_sorted.begin(), f_sorted.end());
    std::sort(s_sorted.begin(), s_sorted.end());
    for (std::size_t i = 0; i < nt; ++i) {
      // Unrounded request times; rounding would widen [0, t] by a millisecond.
      const double t = t_grid[i];
      auto upto = [t](const std::vector<double>& v) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
      };
      distinct[i][r] = upto(f_sorted);
      multi[i][r] = upto(s_sorted);
    }
  }

  std::vector<PsiMonteCarloPoint> out;
  const double n = reps;
  for (std::size_t i = 0; i < nt; ++i) {
    PsiMonteCarloPoint p;
    p.t = t_grid[i];
    auto moments = [n](const std::vector<double>& xs, double& mean, double& var, double& m4) {
      mean = 0;
      for (double x : xs) mean += x;
      mean /= n;
      double s2 = 0, s4 = 0;
      for (double x : xs) {
        const double d = x - mean;
        s2 += d * d;
        s4 += d * d * d * d;
      }
      var = s2 / (n - 1);
      m4 = s4 / n;
    };
    double m4 = 0, mv = 0, mm4 = 0;
    moments(distinct[i], p.mean, p.variance, m4);
    p.stderr_mean = std::sqrt(p.variance / n);
    // Var(s^2) ~ (mu4 - sigma^4 (n - 3) / (n - 1)) / n
    const double var_of_var = (m4 - p.variance * p.variance * (n - 3) / (n - 1)) / n;
    p.stderr_variance = std::sqrt(std::max(var_of_var, 0.0));
    moments(multi[i], p.multi_mean, mv, mm4);
    p.multi_stderr = std::sqrt(mv / n);
    out.push_back(p);
  }
  return out;
}

}  // namespace boxche
