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

#include "boxche/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxche {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double to_double(const std::string& s, std::string_view spec) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + s + "' in grid spec '" + std::string(spec) + "'");
  }
  return v;
}

std::vector<std::uint64_t> dedupe_sizes(const std::vector<double>& raw) {
  std::vector<std::uint64_t> out;
  for (double v : raw) {
    const auto c = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(v)));
    if (out.empty() || c > out.back()) out.push_back(c);
  }
  return out;
}

// Rounds a spaced grid to n distinct integers when [lo, hi] holds that many,
// nudging collisions at the dense end up by one.
std::vector<std::uint64_t> distinct_sizes(const std::vector<double>& raw) {
  auto out = dedupe_sizes(raw);
  if (raw.empty() || out.size() == raw.size()) return out;
  const auto lo = static_cast<long long>(std::max<long long>(1, std::llround(raw.front())));
  const auto hi = static_cast<long long>(std::max<long long>(1, std::llround(raw.back())));
  const auto n = static_cast<long long>(raw.size());
  if (hi - lo + 1 < n) return out;
  std::vector<long long> v(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    v[i] = std::max<long long>(1, std::llround(raw[i]));
    if (i > 0) v[i] = std::max(v[i], v[i - 1] + 1);
  }
  v.back() = std::min(v.back(), hi);
  for (std::size_t i = raw.size() - 1; i-- > 0;) v[i] = std::min(v[i], v[i + 1] - 1);
  return {v.begin(), v.end()};
}

std::vector<double> spaced(double lo, double hi, std::size_t n, bool logarithmic) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = logarithmic ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                       : lo + f * (hi - lo);
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> resolve_grid(std::string_view spec, std::uint64_t distinct_docs) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) {
    std::vector<double> raw;
    for (const auto& f : split(spec, ',')) raw.push_back(to_double(f, spec));
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] < 1 || std::floor(raw[i]) != raw[i]) {
        throw std::invalid_argument("explicit cache sizes must be positive integers");
      }
      if (i > 0 && raw[i] <= raw[i - 1]) throw std::invalid_argument("cache sizes must ascend");
    }
    return dedupe_sizes(raw);
  }
  if (parts.size() != 4) throw std::invalid_argument("grid spec '" + std::string(spec) + "' has wrong arity");
  const auto& kind = parts[0];
  const double n_raw = to_double(parts[3], spec);
  if (n_raw < 1 || std::floor(n_raw) != n_raw) throw std::invalid_argument("grid point count must be a positive integer");
  const auto n = static_cast<std::size_t>(n_raw);
  const double lo = to_double(parts[1], spec);
  const double hi = parts[2] == "max" ? static_cast<double>(distinct_docs) : to_double(parts[2], spec);

  if (kind == "rel") {
    if (!(lo > 0 && lo <= hi && hi <= 1)) throw std::invalid_argument("relative grid bounds must satisfy 0 < lo <= hi <= 1");
    const auto m = static_cast<double>(distinct_docs);
    return distinct_sizes(spaced(lo * m, hi * m, n, true));
  }
  if (kind != "log" && kind != "lin") throw std::invalid_argument("unknown grid kind '" + kind + "'");
  if (!(lo >= 1 && lo <= hi)) throw std::invalid_argument("grid bounds must satisfy 1 <= lo <= hi");
  return distinct_sizes(spaced(lo, hi, n, kind == "log"));
}

std::vector<double> resolve_time_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  std::vector<double> out;
  if (parts.size() == 1) {
    for (const auto& f : split(spec, ',')) out.push_back(to_double(f, spec));
  } else if (parts.size() == 4 && parts[0] == "lin") {
    const double n = to_double(parts[3], spec);
    if (n < 1 || std::floor(n) != n) throw std::invalid_argument("grid point count must be a positive integer");
    out = spaced(to_double(parts[1], spec), to_double(parts[2], spec), static_cast<std::size_t>(n), false);
  } else {
    throw std::invalid_argument("time grid must be 'lin:<lo>:<hi>:<n>' or a comma list");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0) throw std::invalid_argument("times must be non-negative");
    if (i > 0 && out[i] <= out[i - 1]) throw std::invalid_argument("times must ascend");
  }
  return out;
}

}  // namespace boxche
