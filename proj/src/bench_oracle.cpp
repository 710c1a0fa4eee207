// Copyright 2026 The dsm-nas Authors.
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

#include "dsm/bench_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsm/errors.hpp"

namespace dsm {

namespace {
constexpr std::uint64_t kGenerationGuard = 1'000'000;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void TabularBenchmark::validate(bool require_exhaustive) const {
  spec.validate();
  for (const auto& [arch, entry] : entries) {
    validate_architecture(spec, arch);
    if (!(entry.val_metric >= 0.0 && entry.val_metric <= 1.0) ||
        !(entry.test_metric >= 0.0 && entry.test_metric <= 1.0)) {
      throw DataError("metric out of [0,1] for architecture " + to_text(arch));
    }
  }
  if (require_exhaustive && entries.size() != spec.space_size()) {
    throw DataError("benchmark covers " + std::to_string(entries.size()) + " of " +
                    std::to_string(spec.space_size()) + " architectures");
  }
}

const BenchEntry& TabularBenchmark::at(const Architecture& arch) const {
  auto it = entries.find(arch);
  if (it == entries.end()) {
    throw MissingEntryError("architecture " + to_text(arch) + " not in benchmark " + name);
  }
  return it->second;
}

const Architecture& TabularBenchmark::best_by_val() const {
  if (entries.empty()) throw DataError("empty benchmark");
  const Architecture* best = nullptr;
  double best_val = -1.0;
  for (const auto& [arch, entry] : entries) {
    if (entry.val_metric > best_val) {
      best_val = entry.val_metric;
      best = &arch;
    }
  }
  return *best;
}

double Oracle::query_val(const Architecture& arch) {
  if (memoize_) {
    auto it = cache_.find(arch);
    if (it != cache_.end()) return it->second;
  }
  if (budget_.used >= budget_.limit) {
    throw BudgetError("query budget of " + std::to_string(budget_.limit) + " exhausted");
  }
  const double val = bench_.at(arch).val_metric;
  ++budget_.used;
  if (memoize_) cache_.emplace(arch, val);
  return val;
}

double Oracle::query_test(const Architecture& arch) const {
  return bench_.at(arch).test_metric;
}

void SyntheticBenchSpec::validate() const {
  space.validate();
  if (!(interaction_strength >= 0.0) || !std::isfinite(interaction_strength)) {
    throw ConfigError("interaction strength must be finite and >= 0");
  }
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ConfigError("noise std must be finite and >= 0");
  }
  if (!std::isfinite(utility_scale)) {
    throw ConfigError("utility scale must be finite");
  }
  for (const auto& [a, b] : interaction_pairs) {
    if (a >= space.num_positions() || b >= space.num_positions()) {
      throw ConfigError("interaction pair references invalid position");
    }
  }
}

SyntheticTables draw_synthetic_tables(const SyntheticBenchSpec& spec) {
  // Draw order is fixed: all utilities first, then all interactions, so the
  // tables depend only on (seed, space shape, pair list).
  Rng rng(spec.seed);
  SyntheticTables tables;
  tables.utilities.resize(spec.space.num_positions());
  for (std::size_t i = 0; i < spec.space.num_positions(); ++i) {
    tables.utilities[i].resize(spec.space.candidates[i].size());
    for (double& u : tables.utilities[i]) u = rng.normal(0.0, spec.utility_scale);
  }
  tables.interactions.resize(spec.interaction_pairs.size());
  for (std::size_t p = 0; p < spec.interaction_pairs.size(); ++p) {
    const auto [i, j] = spec.interaction_pairs[p];
    auto& table = tables.interactions[p];
    table.resize(spec.space.candidates[i].size());
    for (auto& row : table) {
      row.resize(spec.space.candidates[j].size());
      for (double& w : row) w = rng.normal(0.0, 1.0);
    }
  }
  return tables;
}

double synthetic_score(const SyntheticBenchSpec& spec, const SyntheticTables& tables,
                       const Architecture& arch) {
  double score = 0.0;
  for (std::size_t i = 0; i < arch.codes.size(); ++i) {
    score += tables.utilities[i][spec.space.code_index(i, arch.codes[i])];
  }
  for (std::size_t p = 0; p < spec.interaction_pairs.size(); ++p) {
    const auto [i, j] = spec.interaction_pairs[p];
    const int a = spec.space.code_index(i, arch.codes[i]);
    const int b = spec.space.code_index(j, arch.codes[j]);
    score += spec.interaction_strength * tables.interactions[p][a][b];
  }
  return score;
}

TabularBenchmark generate_synthetic(const SyntheticBenchSpec& spec) {
  spec.validate();
  spec.space.space_size(kGenerationGuard);
  const SyntheticTables tables = draw_synthetic_tables(spec);

  // Separate noise stream so table draws stay independent of space order.
  Rng noise_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  TabularBenchmark bench;
  bench.spec = spec.space;
  bench.name = spec.name;
  for (const Architecture& arch : enumerate_space(spec.space)) {
    const double score = synthetic_score(spec, tables, arch);
    const double noise = spec.noise_std > 0.0 ? noise_rng.normal(0.0, spec.noise_std) : 0.0;
    const double gap = spec.noise_std > 0.0 ? noise_rng.normal(0.0, spec.noise_std) : 0.0;
    bench.entries.emplace(arch, BenchEntry{logistic(score + noise), logistic(score + noise + gap)});
  }
  return bench;
}

SyntheticBenchSpec default_synthetic_spec() {
  SyntheticBenchSpec spec;
  spec.space = SearchSpaceSpec::uniform(6, 5);
  spec.utility_scale = 0.5;
  spec.interaction_strength = 0.5;
  for (std::size_t i = 0; i + 1 < 6; ++i) spec.interaction_pairs.emplace_back(i, i + 1);
  spec.noise_std = 0.02;
  spec.seed = 1;
  spec.name = "synthetic-default";
  return spec;
}

TabularBenchmark load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open benchmark file " + path);
  TabularBenchmark bench;
  bench.name = path;
  std::string line;
  std::size_t lineno = 0;

  auto fail = [&](const std::string& what) {
    throw DataError(path + ":" + std::to_string(lineno) + ": " + what);
  };

  if (!std::getline(in, line)) fail("missing header");
  ++lineno;
  std::size_t length = 0;
  if (std::sscanf(line.c_str(), "#space L=%zu", &length) != 1 || length == 0) {
    fail("expected '#space L=<int>' header");
  }
  bench.spec.candidates.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    if (!std::getline(in, line)) fail("missing '#pos' header line");
    ++lineno;
    std::size_t pos = 0;
    char codes_buf[512];
    if (std::sscanf(line.c_str(), "#pos %zu codes=%511s", &pos, codes_buf) != 2 || pos != i) {
      fail("expected '#pos " + std::to_string(i) + " codes=...'");
    }
    std::istringstream codes(codes_buf);
    std::string item;
    while (std::getline(codes, item, '|')) {
      try {
        bench.spec.candidates[i].push_back(std::stoi(item));
      } catch (const std::exception&) {
        fail("bad code '" + item + "'");
      }
    }
    if (bench.spec.candidates[i].empty()) fail("empty candidate list");
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream record(line);
    std::string arch_text;
    double val = 0.0, test = 0.0;
    if (!(record >> arch_text >> val >> test)) fail("expected '<arch> <val> <test>'");
    Architecture arch;
    try {
      arch = parse_architecture(arch_text);
      validate_architecture(bench.spec, arch);
    } catch (const DataError& e) {
      fail(e.what());
    }
    if (!(val >= 0.0 && val <= 1.0) || !(test >= 0.0 && test <= 1.0)) {
      fail("metric out of [0,1]");
    }
    if (!bench.entries.emplace(arch, BenchEntry{val, test}).second) {
      fail("duplicate architecture " + arch_text);
    }
  }
  bench.validate();
  return bench;
}

void save_benchmark(const TabularBenchmark& bench, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw DataError("cannot write benchmark file " + path);
  out << "#space L=" << bench.spec.num_positions() << "\n";
  for (std::size_t i = 0; i < bench.spec.num_positions(); ++i) {
    out << "#pos " << i << " codes=";
    const auto& cand = bench.spec.candidates[i];
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (k) out << '|';
      out << cand[k];
    }
    out << "\n";
  }
  for (const auto& [arch, entry] : bench.entries) {
    out << to_text(arch) << ' ' << format_metric(entry.val_metric) << ' '
        << format_metric(entry.test_metric) << "\n";
  }
  if (!out) throw DataError("write failure on " + path);
}

std::vector<LocalityRow> locality_report(const TabularBenchmark& bench,
                                         std::size_t num_pairs, Rng& rng) {
  std::vector<const Architecture*> keys;
  keys.reserve(bench.entries.size());
  std::vector<double> vals;
  vals.reserve(bench.entries.size());
  for (const auto& [arch, entry] : bench.entries) {
    keys.push_back(&arch);
    vals.push_back(entry.val_metric);
  }

  const std::size_t buckets = bench.spec.num_positions() + 1;
  std::vector<std::size_t> count(buckets, 0);
  std::vector<double> sum(buckets, 0.0), sum_sq(buckets, 0.0);
  for (std::size_t n = 0; n < num_pairs; ++n) {
    const std::size_t a = rng.uniform_index(keys.size());
    const std::size_t b = rng.uniform_index(keys.size());
    const std::size_t d = distance(*keys[a], *keys[b]);
    const double diff = std::abs(vals[a] - vals[b]);
    ++count[d];
    sum[d] += diff;
    sum_sq[d] += diff * diff;
  }

  std::vector<LocalityRow> rows;
  for (std::size_t d = 0; d < buckets; ++d) {
    if (count[d] == 0) continue;
    LocalityRow row;
    row.distance = d;
    row.pairs = count[d];
    row.mean_abs_diff = sum[d] / count[d];
    const double var = sum_sq[d] / count[d] - row.mean_abs_diff * row.mean_abs_diff;
    row.std_abs_diff = var > 0.0 ? std::sqrt(var) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dsm
