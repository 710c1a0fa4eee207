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

#ifndef DSM_BENCH_ORACLE_HPP
#define DSM_BENCH_ORACLE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsm/rng.hpp"
#include "dsm/search_space.hpp"

namespace dsm {

struct BenchEntry {
  double val_metric = 0.0;   // proxy-budget validation metric, in [0,1]
  double test_metric = 0.0;  // full-budget test metric, in [0,1]

  bool operator==(const BenchEntry&) const = default;
};

// Precomputed architecture -> metric table acting as the evaluation oracle.
struct TabularBenchmark {
  SearchSpaceSpec spec;
  std::map<Architecture, BenchEntry> entries;
  std::string name;

  // Throws on invalid metrics or architectures; checks full coverage when
  // require_exhaustive is set.
  void validate(bool require_exhaustive = false) const;

  const BenchEntry& at(const Architecture& arch) const;

  // Entry with the highest val metric (ties: lexicographically smallest).
  const Architecture& best_by_val() const;
};

struct QueryBudget {
  std::size_t limit = 0;
  std::size_t used = 0;

  std::size_t remaining() const { return limit - used; }
};

// Meters validation queries against a budget. Repeated queries for the same
// architecture are memoized by default and cost one query in total.
class Oracle {
 public:
  Oracle(const TabularBenchmark& bench, std::size_t budget_limit, bool memoize = true)
      : bench_(bench), budget_{budget_limit, 0}, memoize_(memoize) {}

  // Throws BudgetError once the limit is reached, MissingEntryError for
  // unknown architectures.
  double query_val(const Architecture& arch);

  // Final reporting only; never consumes budget.
  double query_test(const Architecture& arch) const;

  const QueryBudget& budget() const { return budget_; }
  std::size_t distinct_queried() const { return cache_.size(); }
  bool space_exhausted() const { return cache_.size() == bench_.entries.size(); }
  const TabularBenchmark& benchmark() const { return bench_; }

 private:
  const TabularBenchmark& bench_;
  QueryBudget budget_;
  bool memoize_;
  std::map<Architecture, double> cache_;
};

// Desk-scale synthetic stand-in for a tabular NAS benchmark. Scores are a
// sum of per-position utilities plus pairwise interactions plus noise, so
// nearby architectures get similar metrics by construction.
struct SyntheticBenchSpec {
  SearchSpaceSpec space;
  double utility_scale = 0.5;
  double interaction_strength = 0.5;               // lambda >= 0
  std::vector<std::pair<std::size_t, std::size_t>> interaction_pairs;
  double noise_std = 0.02;
  std::uint64_t seed = 1;
  std::string name = "synthetic";

  void validate() const;
};

// Utility tables drawn from the spec's seed; exposed so tests can recompute
// scores independently of the generated table.
struct SyntheticTables {
  // utilities[i][k] for candidate index k at position i.
  std::vector<std::vector<double>> utilities;
  // interactions[p][a][b] for pair p and candidate indices a, b.
  std::vector<std::vector<std::vector<double>>> interactions;
};

SyntheticTables draw_synthetic_tables(const SyntheticBenchSpec& spec);

// Raw (noise-free) score of an architecture under the drawn tables.
double synthetic_score(const SyntheticBenchSpec& spec, const SyntheticTables& tables,
                       const Architecture& arch);

// Full-space benchmark; deterministic given the spec. val = logistic(score +
// noise); test = logistic(score + noise + extra seeded perturbation).
TabularBenchmark generate_synthetic(const SyntheticBenchSpec& spec);

// L=6, C=5, lambda=0.5, eps=0.02, adjacent interaction pairs, seed 1.
SyntheticBenchSpec default_synthetic_spec();

// Line-oriented text format:
//   #space L=<int>
//   #pos <i> codes=<c1|c2|...>   (L lines)
//   <arch-text> <val> <test>     (one record per line)
TabularBenchmark load_benchmark(const std::string& path);
void save_benchmark(const TabularBenchmark& bench, const std::string& path);

struct LocalityRow {
  std::size_t distance = 0;
  std::size_t pairs = 0;
  double mean_abs_diff = 0.0;
  double std_abs_diff = 0.0;
};

// Mean/std of |val(a) - val(b)| over random pairs, bucketed by distance.
// Rows sorted by distance; zero-pair buckets omitted.
std::vector<LocalityRow> locality_report(const TabularBenchmark& bench,
                                         std::size_t num_pairs, Rng& rng);

}  // namespace dsm

#endif  // DSM_BENCH_ORACLE_HPP
