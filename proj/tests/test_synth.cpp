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
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "boxche/che_box.hpp"
#include "boxche/synth.hpp"
#include "doctest.h"

using namespace boxche;

namespace {

GeneratorConfig fixed(double gamma, Millis window, double lambda, double tau) {
  GeneratorConfig c;
  c.gamma = gamma;
  c.window = window;
  c.pairs = {{lambda, tau}};
  return c;
}

}  // namespace

TEST_CASE("degenerate configurations give empty traces") {
  CHECK(generate_box_trace(fixed(0.0, 1000, 0.1, 10), Seed{1}).empty());
  CHECK(generate_box_trace(fixed(0.5, 1000, 0.0, 10), Seed{1}).empty());
  CHECK_THROWS_AS(fixed(-1, 1000, 0.1, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(fixed(1, 0, 0.1, 10).validate(), std::invalid_argument);
  GeneratorConfig none;
  none.gamma = 1;
  CHECK_THROWS_AS(none.validate(), std::invalid_argument);
}

TEST_CASE("request volume matches gamma * A * lambda * tau") {
  const auto c = fixed(1e-2, 100000, 0.05, 2000);
  // Documents that straddle an edge lose requests; with the default
  // warm-up the expected count inside [0, A] is still gamma A lambda tau.
  const double mean = 1e-2 * 1e5 * 0.05 * 2000;
  const double n = 0.05 * 2000;
  const double sd = std::sqrt(1e-2 * 1e5 * (n + n * n));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto t = generate_box_trace(c, Seed{s});
    INFO("seed " << s << " got " << t.size());
    CHECK(std::abs(static_cast<double>(t.size()) - mean) <= 3 * sd);
  }
}

TEST_CASE("box traces: determinism, window, lifespans") {
  GeneratorConfig c = fixed(2e-3, 50000, 0.01, 3000);
  c.pairs.push_back({0.1, 200});
  const auto a = generate_box_trace_with_profiles(c, Seed{5});
  const auto b = generate_box_trace_with_profiles(c, Seed{5});
  CHECK(a.trace == b.trace);
  CHECK_FALSE(a.trace == generate_box_trace(c, Seed{6}));
  REQUIRE(a.profiles.size() == a.trace.doc_table_size());
  for (const auto& e : a.trace.events()) {
    CHECK(e.timestamp >= 0);
    CHECK(e.timestamp <= c.window);
    const auto& p = a.profiles[index_of(e.doc)];
    CHECK(static_cast<double>(e.timestamp) >= p.arrival - 0.5);
    CHECK(static_cast<double>(e.timestamp) <= p.arrival + p.tau + 0.5);
  }
}

TEST_CASE("per-document counts are Poisson(lambda tau)") {
  // Documents whose box lies inside the window keep all requests.
  const auto c = fixed(5e-3, 2'000'000, 0.002, 2000);  // mean 4
  const auto g = generate_box_trace_with_profiles(c, Seed{11});
  std::vector<std::uint64_t> counts(g.profiles.size());
  for (const auto& e : g.trace.events()) ++counts[index_of(e.doc)];
  std::map<std::uint64_t, double> observed;
  std::uint64_t docs = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& p = g.profiles[i];
    if (p.arrival < 1 || p.arrival + p.tau > c.window - 1) continue;
    ++docs;
    ++observed[std::min<std::uint64_t>(counts[i], 10)];
  }
  // Zero-request documents are invisible; condition on n >= 1.
  const double mu = 4.0;
  const double p0 = std::exp(-mu);
  double chi = 0;
  double tail = 1.0 - p0;
  double pk = p0;
  for (std::uint64_t k = 1; k <= 10; ++k) {
    double prob;
    if (k < 10) {
      pk *= mu / static_cast<double>(k);
      prob = pk;
      tail -= pk;
    } else {
      prob = tail;
    }
    const double expected = docs * prob / (1 - p0);
    const double diff = observed[k] - expected;
    chi += diff * diff / expected;
  }
  boost::math::chi_squared dist(9);
  const double crit = boost::math::quantile(dist, 0.99);
  INFO("chi^2 = " << chi << " docs " << docs);
  CHECK(docs > 5000);
  CHECK(chi <= crit);
}

TEST_CASE("IRM generator") {
  const std::vector<double> one{1.0};
  const auto t1 = generate_irm_trace(one, 50, 1000, Seed{1});
  CHECK(t1.size() == 50);
  CHECK(trace_stats(t1).distinct_docs == 1);
  CHECK(generate_irm_trace(one, 0, 1000, Seed{1}).empty());

  const auto w = zipf_weights(1000, 1.0);
  CHECK(w[0] == 1.0);
  CHECK(w[9] == doctest::Approx(0.1));
  const auto t = generate_irm_trace(w, 100000, 1'000'000, Seed{3});
  double total = 0;
  for (double x : w) total += x;
  const double p = w[0] / total;
  std::uint64_t top = 0;
  const auto d0 = t.find_doc("d0");
  REQUIRE(d0.has_value());
  for (const auto& e : t.events()) {
    if (e.doc == *d0) ++top;
    CHECK(e.timestamp >= 0);
    CHECK(e.timestamp <= 1'000'000);
  }
  const double sd = std::sqrt(1e5 * p * (1 - p));
  CHECK(std::abs(static_cast<double>(top) - 1e5 * p) <= 3 * sd);
  CHECK(generate_irm_trace(w, 1000, 10000, Seed{4}) == generate_irm_trace(w, 1000, 10000, Seed{4}));
}

TEST_CASE("Monte Carlo psi") {
  // Time is integer ms, so (gamma, lambda, tau, t) = (1, 1, 2, 2) in
  // seconds becomes (1e-3, 1e-3, 2000, 2000).
  GeneratorConfig c = fixed(1e-3, 20000, 1e-3, 2000);
  const std::vector<double> grid{0, 2000, 5000};
  const auto mc = monte_carlo_psi(c, grid, 2000, Seed{99});
  REQUIRE(mc.size() == 3);
  CHECK(mc[0].mean == 0.0);
  const std::vector<BoxPair> pair{{1e-3, 2000}};
  for (std::size_t i = 1; i < mc.size(); ++i) {
    const double analytic = psi_box(grid[i], 1e-3, pair);
    INFO("t " << grid[i] << " mc " << mc[i].mean << " +- " << mc[i].stderr_mean << " analytic " << analytic);
    CHECK(std::abs(mc[i].mean - analytic) <= 3 * mc[i].stderr_mean);
    // Distinct-document counts are Poisson.
    CHECK(std::abs(mc[i].variance - mc[i].mean) <= 4 * mc[i].stderr_variance);
  }
  CHECK(psi_box(2000, 1e-3, pair) == doctest::Approx(2.27067).epsilon(1e-5));
  CHECK_THROWS_AS(monte_carlo_psi(c, grid, 1, Seed{1}), std::invalid_argument);
  const std::vector<double> past{30000};
  CHECK_THROWS_AS(monte_carlo_psi(c, past, 10, Seed{1}), std::invalid_argument);
}

TEST_CASE("generator config JSON") {
  std::istringstream in(R"({"gamma": 0.5, "window_ms": 1000, "pairs": [[0.1, 20], [0.2, 5]]})");
  const auto c = parse_generator_config(in);
  CHECK(c.gamma == 0.5);
  CHECK(c.window == 1000);
  REQUIRE(c.pairs.size() == 2);
  CHECK(c.pairs[1].tau == 5);
  CHECK_FALSE(c.warmup.has_value());
  CHECK(c.effective_warmup() == 20);

  std::istringstream round(generator_config_json(c));
  const auto d = parse_generator_config(round);
  CHECK(d.gamma == c.gamma);
  CHECK(d.pairs.size() == 2);

  std::istringstream bad(R"({"gamma": -1, "window_ms": 1000, "pairs": [[0.1, 20]]})");
  CHECK_THROWS_AS(parse_generator_config(bad), std::invalid_argument);
  std::istringstream junk("{not json");
  CHECK_THROWS(parse_generator_config(junk));
}
