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

#include "boxche/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "boxche/che_box.hpp"
#include "boxche/error.hpp"
#include "boxche/estimators.hpp"
#include "boxche/grid.hpp"
#include "boxche/kernels.hpp"
#include "boxche/lru.hpp"
#include "boxche/shuffle.hpp"
#include "boxche/synth.hpp"
#include "boxche/trace.hpp"

namespace boxche::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Either the caller's stream or a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot open output '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("failed writing '" + path_ + "'");
    }
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct TraceInput {
  std::string path;
  std::optional<Millis> window_ms;
  std::optional<Millis> gap_ms;
};

void add_trace_options(CLI::App* sub, TraceInput& in) {
  sub->add_option("trace", in.path, "Input trace CSV (timestamp_ms,doc_id[,user_id])")->required();
  sub->add_option("--window-ms", in.window_ms, "Observation window length (default: last timestamp)");
  sub->add_option("--gap-ms", in.gap_ms, "Consolidate same user/doc requests closer than this gap");
}

Trace load_trace(const TraceInput& in) {
  std::ifstream file(in.path, std::ios::binary);
  if (!file) throw IoError("cannot open trace '" + in.path + "'");
  Trace t = parse_trace(file, in.window_ms);
  if (in.gap_ms) t = consolidate_sessions(t, *in.gap_ms);
  return t;
}

json trace_params(const TraceInput& in) {
  json p;
  p["window_ms"] = in.window_ms ? json(*in.window_ms) : json(nullptr);
  p["gap_ms"] = in.gap_ms ? json(*in.gap_ms) : json(nullptr);
  return p;
}

struct Manifest {
  std::string path;
  json body;

  void write() const {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write manifest '" + path + "'");
    f << body.dump(2) << '\n';
  }
};

Manifest start_manifest(const std::vector<std::string>& argv, const std::string& subcommand,
                        const std::string& out_path, const std::string& manifest_path) {
  Manifest m;
  m.path = !manifest_path.empty() ? manifest_path : (out_path.empty() ? "" : out_path + ".manifest.json");
  m.body["tool"] = "boxche";
  m.body["version"] = std::string(kToolVersion);
  m.body["subcommand"] = subcommand;
  m.body["argv"] = argv;
  m.body["outputs"] = json::array();
  if (!out_path.empty()) m.body["outputs"].push_back(out_path);
  return m;
}

GeneratorConfig config_from(const std::string& config_path, std::optional<double> gamma,
                            std::optional<Millis> window, std::optional<double> lambda,
                            std::optional<double> tau, std::optional<double> warmup) {
  GeneratorConfig c;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config '" + config_path + "'");
    c = parse_generator_config(in);
    if (gamma) c.gamma = *gamma;
    if (window) c.window = *window;
    if (warmup) c.warmup = *warmup;
  } else {
    if (!gamma || !window || !lambda || !tau) {
      throw std::invalid_argument("need --config or all of --gamma, --window-ms, --lambda, --tau");
    }
    c.gamma = *gamma;
    c.window = *window;
    c.pairs = {{*lambda, *tau}};
    c.warmup = warmup;
  }
  c.validate();
  return c;
}

void write_curves_long(std::ostream& out, const SemiExperimentReport& r) {
  out << "kind,cache_size,relative_size,hit_ratio\n";
  auto emit = [&](std::string_view kind, const HitRatioCurve& c) {
    for (const auto& p : c.points) {
      out << kind << ',' << p.cache_size << ',' << fmt6(p.relative_size) << ',' << fmt6(p.hit_ratio) << '\n';
    }
  };
  emit("original", r.original);
  for (auto kind : kAllRandomizations) emit(to_string(kind), r.curve(kind));
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LRU hit-ratio analysis for dynamic catalogs"};
  app.name(argv.empty() ? "boxche" : argv[0]);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string out_path, manifest_path, sizes_spec{kDefaultGridSpec}, simd;
  std::uint64_t seed = 0;
  app.add_option("--simd", simd, "Force kernel variant (scalar|avx2)");

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output path (default: stdout)");
    sub->add_option("--manifest", manifest_path, "Manifest path (default: <out>.manifest.json)");
  };

  // simulate
  TraceInput sim_in;
  auto* simulate = app.add_subcommand("simulate", "LRU hit-ratio curve via stack distances");
  add_trace_options(simulate, sim_in);
  simulate->add_option("--sizes", sizes_spec, "Cache-size grid (log:lo:hi|max:n, lin:..., rel:..., or list)");
  add_out(simulate);

  // shuffle
  TraceInput shuf_in;
  std::string kind = "all";
  auto* shuffle = app.add_subcommand("shuffle", "Semi-experiment randomizations");
  add_trace_options(shuffle, shuf_in);
  shuffle->add_option("--kind", kind, "global|positional|local|all")
      ->check(CLI::IsMember({"global", "positional", "local", "all"}));
  shuffle->add_option("--seed", seed, "Root seed");
  shuffle->add_option("--sizes", sizes_spec, "Cache-size grid (kind=all)");
  add_out(shuffle);

  // predict
  TraceInput pred_in;
  std::string method = "box", meta_path;
  std::uint64_t min_requests = 2;
  auto* predict = app.add_subcommand("predict", "Che-approximation hit-ratio prediction");
  add_trace_options(predict, pred_in);
  predict->add_option("--method", method, "box|classic")->check(CLI::IsMember({"box", "classic"}));
  predict->add_option("--sizes", sizes_spec, "Cache-size grid");
  predict->add_option("--min-requests", min_requests, "Minimum requests for a document to enter the (lambda, tau) sample");
  predict->add_option("--meta", meta_path, "Metadata JSON path (default: <out>.meta.json, else stderr)");
  add_out(predict);

  // generate / validate-psi share the generator flags
  std::string config_path;
  std::optional<double> gamma, lambda, tau, warmup;
  std::optional<Millis> window;
  auto add_generator = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Generator JSON {gamma, window_ms, warmup_ms, pairs}");
    sub->add_option("--gamma", gamma, "Catalog arrival rate (docs/ms)");
    sub->add_option("--window-ms", window, "Observation window (ms)");
    sub->add_option("--lambda", lambda, "Fixed request rate (req/ms)");
    sub->add_option("--tau", tau, "Fixed lifespan (ms)");
    sub->add_option("--warmup-ms", warmup, "Arrival extension before 0 (ms)");
    sub->add_option("--seed", seed, "Root seed");
  };
  auto* generate = app.add_subcommand("generate", "Synthetic box-model trace");
  add_generator(generate);
  add_out(generate);

  std::string t_grid_spec;
  std::uint32_t reps = 500;
  auto* validate = app.add_subcommand("validate-psi", "Monte Carlo check of the distinct-document mean");
  add_generator(validate);
  validate->add_option("--t-grid", t_grid_spec, "Times (lin:lo:hi:n or list)")->required();
  validate->add_option("--reps", reps, "Replications (>= 2)");
  add_out(validate);

  // estimate / rank / stats / consolidate / subtrace
  TraceInput est_in;
  auto* estimate = app.add_subcommand("estimate", "Per-document lifespan and rate estimates");
  add_trace_options(estimate, est_in);
  estimate->add_option("--min-requests", min_requests, "Minimum requests per exported document");
  add_out(estimate);

  TraceInput rank_in;
  auto* rank = app.add_subcommand("rank", "Rank-frequency table");
  add_trace_options(rank, rank_in);
  add_out(rank);

  TraceInput stats_in;
  auto* stats = app.add_subcommand("stats", "Trace summary as JSON");
  add_trace_options(stats, stats_in);
  add_out(stats);

  TraceInput cons_in;
  auto* consolidate = app.add_subcommand("consolidate", "Collapse per-user sessions (--gap-ms, default 480000)");
  add_trace_options(consolidate, cons_in);
  add_out(consolidate);

  TraceInput sub_in;
  Millis duration = 0;
  auto* subtrace = app.add_subcommand("subtrace", "Busiest sub-trace of a given duration");
  add_trace_options(subtrace, sub_in);
  subtrace->add_option("--duration-ms", duration, "Sub-trace duration")->required();
  add_out(subtrace);

  std::string rerun_path;
  auto* rerun = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  rerun->add_option("manifest", rerun_path, "Manifest JSON")->required();

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  if (cargv.empty()) cargv.push_back("boxche");
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (!simd.empty()) {
      if (simd == "scalar") kernels::set_active_isa(kernels::Isa::kScalar);
      else if (simd == "avx2") kernels::set_active_isa(kernels::Isa::kAvx2);
      else throw std::invalid_argument("--simd must be scalar or avx2");
    }

    if (*rerun) {
      std::ifstream f(rerun_path);
      if (!f) throw IoError("cannot open manifest '" + rerun_path + "'");
      json m;
      try {
        m = json::parse(f);
      } catch (const json::exception& e) {
        throw IoError(std::string("bad manifest: ") + e.what());
      }
      return run(m.at("argv").get<std::vector<std::string>>(), out, err);
    }

    if (*simulate) {
      const Trace trace = load_trace(sim_in);
      const auto summary = trace_stats(trace);
      const auto sizes = resolve_grid(sizes_spec, summary.distinct_docs);
      const auto curve = hit_ratio_curve(trace, sizes);
      Sink sink(out_path, out);
      write_curve_csv(sink.get(), curve);
      sink.close();
      auto man = start_manifest(argv, "simulate", out_path, manifest_path);
      man.body["inputs"] = {sim_in.path};
      man.body["params"] = trace_params(sim_in);
      man.body["sizes_spec"] = sizes_spec;
      man.body["sizes"] = sizes;
      man.write();
      return kOk;
    }

    if (*shuffle) {
      const Trace trace = load_trace(shuf_in);
      auto man = start_manifest(argv, "shuffle", out_path, manifest_path);
      man.body["inputs"] = {shuf_in.path};
      man.body["params"] = trace_params(shuf_in);
      man.body["params"]["kind"] = kind;
      man.body["seed"] = seed;
      Sink sink(out_path, out);
      if (kind == "all") {
        const auto sizes = resolve_grid(sizes_spec, trace_stats(trace).distinct_docs);
        const auto report = run_semi_experiments(trace, sizes, Seed{seed});
        write_curves_long(sink.get(), report);
        man.body["sizes_spec"] = sizes_spec;
        man.body["sizes"] = sizes;
        for (auto k : kAllRandomizations) {
          err << "mare," << to_string(k) << ',' << fmt6(report.mare_of(k)) << '\n';
          man.body["mare"][std::string(to_string(k))] = report.mare_of(k);
        }
      } else {
        const Randomization r = kind == "global"       ? Randomization::kGlobal
                                : kind == "positional" ? Randomization::kPositional
                                                       : Randomization::kLocal;
        write_trace(sink.get(), randomize(trace, r, semi_experiment_seed(Seed{seed}, r)));
      }
      sink.close();
      man.write();
      return kOk;
    }

    if (*predict) {
      const Trace trace = load_trace(pred_in);
      const auto summary = trace_stats(trace);
      const auto sizes = resolve_grid(sizes_spec, summary.distinct_docs);
      json meta;
      meta["method"] = method;
      ChePrediction pred;
      if (method == "box") {
        const auto sample = build_joint_sample(trace, min_requests);
        const double gamma_hat = estimate_catalog_rate(summary, trace.window().length).gamma_hat;
        pred = predict_box_curve(sample, gamma_hat, sizes, summary.distinct_docs);
        meta["gamma_hat"] = gamma_hat;
        meta["n1"] = sample.n1;
        meta["n2"] = sample.n2;
        meta["mean_n_multi"] = sample.mean_n_multi;
        meta["pairs"] = sample.pairs.size();
        meta["window_ms"] = sample.window;
      } else {
        std::vector<std::uint64_t> counts;
        for (const auto& a : doc_activity(trace))
          if (a.count > 0) counts.push_back(a.count);
        pred = che_classic_irm(counts, trace.window().length, sizes);
        meta["documents"] = counts.size();
      }
      auto tcs = json::array();
      for (const auto& t : pred.times) {
        tcs.push_back({{"cache_size", t.cache_size}, {"t_c_ms", finite_or_null(t.t_c)}, {"residual", t.residual}});
      }
      meta["t_c"] = tcs;
      meta["warnings"] = pred.warnings;
      for (const auto& w : pred.warnings) err << "warning: " << w << '\n';

      Sink sink(out_path, out);
      write_curve_csv(sink.get(), pred.curve);
      sink.close();
      const std::string meta_file = !meta_path.empty() ? meta_path : (out_path.empty() ? "" : out_path + ".meta.json");
      if (meta_file.empty()) {
        err << meta.dump() << '\n';
      } else {
        std::ofstream mf(meta_file, std::ios::binary | std::ios::trunc);
        if (!mf) throw IoError("cannot write metadata '" + meta_file + "'");
        mf << meta.dump(2) << '\n';
      }
      auto man = start_manifest(argv, "predict", out_path, manifest_path);
      man.body["inputs"] = {pred_in.path};
      man.body["params"] = trace_params(pred_in);
      man.body["params"]["method"] = method;
      man.body["params"]["min_requests"] = min_requests;
      man.body["sizes_spec"] = sizes_spec;
      man.body["sizes"] = sizes;
      if (!meta_file.empty()) man.body["outputs"].push_back(meta_file);
      man.write();
      return kOk;
    }

    if (*generate) {
      const auto config = config_from(config_path, gamma, window, lambda, tau, warmup);
      const Trace trace = generate_box_trace(config, Seed{seed});
      Sink sink(out_path, out);
      write_trace(sink.get(), trace);
      sink.close();
      auto man = start_manifest(argv, "generate", out_path, manifest_path);
      man.body["seed"] = seed;
      man.body["params"]["config"] = json::parse(generator_config_json(config));
      if (!config_path.empty()) man.body["inputs"] = {config_path};
      man.write();
      return kOk;
    }

    if (*validate) {
      const auto config = config_from(config_path, gamma, window, lambda, tau, warmup);
      const auto grid = resolve_time_grid(t_grid_spec);
      const auto mc = monte_carlo_psi(config, grid, reps, Seed{seed});
      bool ok = true;
      Sink sink(out_path, out);
      sink.get() << "t_ms,psi_analytic,mc_mean,mc_stderr,z_score\n";
      for (const auto& p : mc) {
        const double analytic = psi_box(p.t, config.gamma, std::span<const BoxPair>(config.pairs));
        double z = 0.0;
        if (p.stderr_mean > 0) z = (p.mean - analytic) / p.stderr_mean;
        else if (std::abs(p.mean - analytic) > 1e-9 * std::max(1.0, analytic)) z = std::numeric_limits<double>::infinity();
        if (!(std::abs(z) <= 3.0)) ok = false;
        sink.get() << fmt10(p.t) << ',' << fmt10(analytic) << ',' << fmt10(p.mean) << ','
                   << fmt10(p.stderr_mean) << ',' << fmt6(z) << '\n';
      }
      sink.close();
      auto man = start_manifest(argv, "validate-psi", out_path, manifest_path);
      man.body["seed"] = seed;
      man.body["params"]["config"] = json::parse(generator_config_json(config));
      man.body["params"]["t_grid"] = t_grid_spec;
      man.body["params"]["reps"] = reps;
      man.body["passed"] = ok;
      man.write();
      if (!ok) {
        err << "validate-psi: |z| > 3 at one or more times\n";
        return kValidationFailure;
      }
      return kOk;
    }

    auto simple = [&](const TraceInput& in, const char* name, auto&& body) {
      const Trace trace = load_trace(in);
      Sink sink(out_path, out);
      body(sink.get(), trace);
      sink.close();
      auto man = start_manifest(argv, name, out_path, manifest_path);
      man.body["inputs"] = {in.path};
      man.body["params"] = trace_params(in);
      man.write();
      return kOk;
    };

    if (*estimate) {
      return simple(est_in, "estimate", [&](std::ostream& o, const Trace& t) { write_estimates_csv(o, t, min_requests); });
    }
    if (*rank) {
      return simple(rank_in, "rank", [](std::ostream& o, const Trace& t) {
        o << "rank,requests\n";
        for (const auto& [r, n] : rank_frequency(t)) o << r << ',' << n << '\n';
      });
    }
    if (*stats) {
      return simple(stats_in, "stats", [](std::ostream& o, const Trace& t) {
        const auto s = trace_stats(t);
        json j{{"total_requests", s.total_requests},
               {"distinct_docs", s.distinct_docs},
               {"docs_single_request", s.docs_single_request},
               {"docs_multi_request", s.docs_multi_request},
               {"mean_requests_multi", s.mean_requests_multi},
               {"window_ms", t.window().length},
               {"gamma_hat", estimate_catalog_rate(s, t.window().length).gamma_hat}};
        o << j.dump(2) << '\n';
      });
    }
    if (*consolidate) {
      if (!cons_in.gap_ms) cons_in.gap_ms = kDefaultSessionGapMs;
      return simple(cons_in, "consolidate", [](std::ostream& o, const Trace& t) { write_trace(o, t); });
    }
    if (*subtrace) {
      return simple(sub_in, "subtrace", [&](std::ostream& o, const Trace& t) { write_trace(o, extract_subtrace(t, duration)); });
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const RangeError& e) {
    err << "range error: " << e.what() << '\n';
    return kIoError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kUsageError;
}

}  // namespace boxche::cli
