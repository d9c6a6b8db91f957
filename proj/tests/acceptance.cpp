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

// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if
// any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>
#include <nlohmann/json.hpp>

#include "boxche/che_box.hpp"
#include "boxche/cli.hpp"
#include "boxche/estimators.hpp"
#include "boxche/grid.hpp"
#include "boxche/lru.hpp"
#include "boxche/shuffle.hpp"
#include "boxche/synth.hpp"
#include "literal_forms.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace boxche;
using namespace boxche::testing;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

fs::path workdir() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / ("boxche_accept_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

HitRatioCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  HitRatioCurve c;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    CurvePoint p;
    char comma;
    std::istringstream row(line);
    row >> p.cache_size >> comma >> p.relative_size >> comma >> p.hit_ratio;
    c.points.push_back(p);
  }
  return c;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "boxche");
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (rc != 0) std::fprintf(stderr, "boxche %s failed (%d): %s\n", args[1].c_str(), rc, err.str().c_str());
  return rc;
}

void criterion1() {
  const auto t0 = Clock::now();
  const std::vector<std::uint64_t> sizes{1, 2, 3, 5, 10, 20, 50, 100, 500, 1000};
  std::mt19937_64 rng(101);
  bool ok = true;
  std::uint64_t checked = 0;
  for (int k = 0; k < 20; ++k) {
    const auto trace = random_trace(rng, 10000, 1000, 1'000'000);
    const auto profile = stack_distances(trace);
    for (auto c : sizes) {
      ok = ok && profile.hits_at(c) == brute_force_lru(trace, c);
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  report(1, ok && secs < 30,
         "LRU stack distances equal brute force on " + std::to_string(checked) + " (trace, C) cells; " +
             fmt("%.2f s", secs));
}

// Heterogeneous box trace shared by criteria 2 and 4.
struct BoxScenario {
  std::string trace_path;
  std::string sizes_spec = "rel:0.01:0.4:20";
};

BoxScenario make_box_scenario() {
  GeneratorConfig c;
  c.window = 10'000'000;
  c.gamma = 3e4 / static_cast<double>(c.window);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 5000; ++i) c.pairs.push_back({1e-5 * std::pow(100.0, u(rng)), 1e4 * std::pow(10.0, u(rng))});
  BoxScenario s;
  const auto cfg = (workdir() / "box_config.json").string();
  std::ofstream(cfg) << generator_config_json(c);
  s.trace_path = (workdir() / "box_trace.csv").string();
  if (cli({"generate", "--config", cfg, "--seed", "1", "--out", s.trace_path}) != 0) s.trace_path.clear();
  return s;
}

void criterion2(const BoxScenario& s) {
  const auto t0 = Clock::now();
  if (s.trace_path.empty()) return report(2, false, "trace generation failed");
  const auto pred = (workdir() / "box_pred.csv").string();
  const auto sim = (workdir() / "box_sim.csv").string();
  const bool ran = cli({"predict", s.trace_path, "--method", "box", "--sizes", s.sizes_spec, "--out", pred}) == 0 &&
                   cli({"simulate", s.trace_path, "--sizes", s.sizes_spec, "--out", sim}) == 0;
  if (!ran) return report(2, false, "predict/simulate failed");
  const auto p = read_curve(pred);
  const auto r = read_curve(sim);
  if (p.points.size() != 20 || r.points.size() != 20) return report(2, false, "grid is not 20 points");
  const double m = mare(r, p);
  const double secs = seconds_since(t0);
  report(2, m <= 0.03 && secs < 120, fmt("box-model Che MARE %.4f%% (limit 3%%); %.1f s", 100 * m, secs));
}

void criterion3() {
  const auto t0 = Clock::now();
  const auto w = zipf_weights(10000, 0.8);
  const auto trace = generate_irm_trace(w, 1'000'000, 100'000'000, Seed{31});
  const auto stats = trace_stats(trace);
  const auto sizes = resolve_grid(std::string(kDefaultGridSpec), stats.distinct_docs);
  const auto sim = hit_ratio_curve(trace, sizes);
  std::vector<std::uint64_t> counts;
  for (const auto& o : observe_documents(trace)) counts.push_back(o.n);
  const auto pred = che_classic_irm(counts, trace.window().length, sizes);
  double worst = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    worst = std::max(worst, std::abs(pred.curve.points[i].hit_ratio - sim.points[i].hit_ratio));
  const double secs = seconds_since(t0);
  report(3, worst <= 0.02 && secs < 60,
         fmt("classic Che on Zipf(0.8) IRM: max |error| %.4f over %.0f sizes; %.1f s", worst,
             static_cast<double>(sizes.size()), secs));
}

void criterion4(const BoxScenario& s) {
  if (s.trace_path.empty()) return report(4, false, "trace generation failed");
  const auto trace = read_trace_file(s.trace_path);
  const auto sizes = resolve_grid(s.sizes_spec, trace_stats(trace).distinct_docs);
  const auto rep = run_semi_experiments(trace, sizes, Seed{1});
  const auto& glob = rep.curve(Randomization::kGlobal);
  bool below = true;
  double worst = -1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (rep.original.points[i].relative_size >= 0.1) continue;
    const double excess = glob.points[i].hit_ratio - rep.original.points[i].hit_ratio;
    worst = std::max(worst, excess);
    below = below && excess <= 0.01;
  }
  const double g = rep.mare_of(Randomization::kGlobal);
  const double l = rep.mare_of(Randomization::kLocal);
  report(4, below && g > l,
         fmt("global HR - original HR <= %.4f below 10%% relative size; MARE global %.4f > local %.4f", worst, g, l));
}

void criterion5() {
  const auto t0 = Clock::now();
  GeneratorConfig c;
  c.window = 20000;
  c.gamma = 0.01;
  c.pairs = {{0.002, 1000}, {0.0005, 8000}, {0.01, 300}, {0.001, 4000}};
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(2000.0 * i);
  const auto mc = monte_carlo_psi(c, grid, 500, Seed{2024});
  double worst_z = 0, worst_v = 0;
  for (const auto& p : mc) {
    const double z = (p.mean - psi_box(p.t, c.gamma, c.pairs)) / p.stderr_mean;
    worst_z = std::max(worst_z, std::abs(z));
    worst_v = std::max(worst_v, std::abs(p.variance - p.mean) / p.stderr_variance);
  }
  const double secs = seconds_since(t0);
  report(5, worst_z <= 3 && worst_v <= 4 && secs < 60,
         fmt("psi Monte Carlo: max |z| %.2f, max variance deviation %.2f s.e.; %.1f s", worst_z, worst_v, secs));
}

void criterion6() {
  // (a) n' residual; n = 1 has root 0 in the limit.
  double worst = 0;
  bool lambert_ok = true;
  for (int n = 1; n <= 1'000'000; ++n) {
    const double np = solve_n_prime(n);
    const double f = np == 0 ? 1.0 : np / -std::expm1(-np);
    worst = std::max(worst, std::abs(f - n));
    if (n <= 700) {
      const double ref = n + boost::math::lambert_w0(-n * std::exp(-static_cast<double>(n)));
      lambert_ok = lambert_ok && std::abs(np - ref) <= 1e-9 * std::max(1.0, ref);
    }
  }
  // (b) lifespan estimator unbiasedness.
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0, 100);
  double sum = 0;
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 5; ++k) {
      const double x = u(rng);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    sum += (hi - lo) * 6.0 / 4.0;
  }
  const double mean_tau = sum / reps;
  // (c) characteristic time round trip.
  std::uniform_real_distribution<double> v(0, 1);
  double worst_rel = 0;
  for (int i = 0; i < 100; ++i) {
    BoxPairs ps;
    const int k = 1 + static_cast<int>(v(rng) * 50);
    for (int j = 0; j < k; ++j) ps.push_back(std::pow(10.0, -5 + 4 * v(rng)), std::pow(10.0, 1 + 5 * v(rng)));
    const double gamma = std::pow(10.0, -4 + 4 * v(rng));
    const double size = std::pow(10.0, 4 * v(rng));
    auto psi = [&](double t) { return psi_box(t, gamma, ps); };
    const auto tc = characteristic_time(size, psi, 1.0);
    worst_rel = std::max(worst_rel, std::abs(psi(tc.t_c) - size) / size);
  }
  report(6, worst <= 1e-10 && lambert_ok && mean_tau >= 99 && mean_tau <= 101 && worst_rel <= 1e-6,
         fmt("n' max residual %.3g; mean tau_hat %.3f; t_C max relative residual %.3g", worst, mean_tau, worst_rel));
}

void criterion7() {
  std::mt19937_64 rng(77);
  bool ok = true;
  for (int k = 0; k < 10; ++k) {
    const auto trace = random_trace(rng, 5000, 300, 500000);
    const auto orig = times_by_doc(trace);
    const auto g = times_by_doc(randomize_global(trace, Seed{static_cast<std::uint64_t>(k)}));
    const auto p = times_by_doc(randomize_positional(trace, Seed{static_cast<std::uint64_t>(k)}));
    const auto l = times_by_doc(randomize_local(trace, Seed{static_cast<std::uint64_t>(k)}));
    for (const auto& [doc, ts] : orig) {
      ok = ok && g.at(doc).size() == ts.size();
      const auto& pt = p.at(doc);
      ok = ok && pt.size() == ts.size();
      for (std::size_t i = 1; ok && i < ts.size(); ++i) ok = ok && pt[i] - pt[i - 1] == ts[i] - ts[i - 1];
      const auto& lt = l.at(doc);
      ok = ok && lt.size() == ts.size() && lt.front() == ts.front() && lt.back() == ts.back();
    }
    ok = ok && g.size() == orig.size() && p.size() == orig.size() && l.size() == orig.size();
  }
  report(7, ok, "global counts, positional gaps and local (n, first, last) preserved on 10 traces");
}

void criterion8() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  for (int i = 0; i < 1000; ++i) {
    const double tau = std::pow(10.0, 1 + 5 * u(rng));
    const double lambda = std::pow(10.0, -1 + 3 * u(rng)) / tau;
    const double t = tau;
    const BoxPair pr{lambda, tau};
    const std::vector<BoxPair> one{pr};
    const double psi = psi_box(t, 1.0, one);
    const double l = big_l(lambda, tau, t);
    const double h = expected_hits_doc(pr, t);
    worst = std::max({worst, rel(psi_branch_long(lambda, tau, t), psi_branch_short(lambda, tau, t)),
                      rel(psi, psi_branch_long(lambda, tau, t)), rel(psi, psi_branch_short(lambda, tau, t)),
                      rel(l_branch_long(lambda, tau, t), l_branch_short(lambda, tau, t)),
                      rel(l, l_branch_long(lambda, tau, t)), rel(l, l_branch_short(lambda, tau, t)),
                      rel(hits_branch_long(lambda, tau, t), hits_branch_short(lambda, tau, t)),
                      rel(h, hits_branch_long(lambda, tau, t)), rel(h, hits_branch_short(lambda, tau, t))});
    // One ulp either side of the breakpoint.
    for (double side : {std::nextafter(t, 0.0), std::nextafter(t, 1e300)}) {
      worst = std::max({worst, rel(psi, psi_box(side, 1.0, one)), rel(l, big_l(lambda, tau, side)),
                        rel(h, expected_hits_doc(pr, side))});
    }
  }
  report(8, worst <= 1e-12, fmt("branch continuity: max relative gap %.3g on 1000 pairs", worst));
}

}  // namespace

int main() {
  criterion1();
  const auto box = make_box_scenario();
  criterion2(box);
  criterion3();
  criterion4(box);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::error_code ec;
  fs::remove_all(workdir(), ec);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
