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

#ifndef DSM_TRAINER_HPP
#define DSM_TRAINER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dsm/bench_oracle.hpp"
#include "dsm/controller.hpp"
#include "dsm/subspace_graph.hpp"

namespace dsm {

enum class RewardMode { kImprovement, kAbsolute };

struct SearchConfig {
  std::size_t num_subspaces = 4;   // K
  std::size_t local_distance = 4;  // M
  std::size_t budget = 1000;       // validation-query limit, init included
  double learning_rate = 1e-2;
  double entropy_weight = 7.5e-4;
  double baseline_decay = 0.95;
  bool use_baseline = true;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 0;
  bool subspace_update = true;
  RewardMode reward_mode = RewardMode::kImprovement;
  bool use_graph = true;  // off = pointwise dense features
  // Initial centers; missing slots are filled with random architectures.
  std::vector<Architecture> warm_start;
  ControllerConfig controller;
  EdgeRule edge_rule = EdgeRule::kCompleteOrder;
  std::size_t edge_nearest_k = 0;
  bool log_graph = false;

  void validate(const SearchSpaceSpec& spec) const;
};

struct IterationRecord {
  std::size_t iteration = 0;
  int subspace = -1;
  Architecture center;
  Architecture candidate;  // beta
  double candidate_val = 0.0;
  double reward = 0.0;
  bool updated = false;
  std::size_t budget_used = 0;
  double best_val = 0.0;  // best center metric after this iteration
};

struct SearchResult {
  std::string algo;
  Architecture final_arch;
  double final_val = 0.0;
  double final_test = 0.0;
  std::size_t queries_used = 0;
  std::size_t distinct_centers = 0;  // unique centers ever held by a node
  std::vector<IterationRecord> trajectory;
  std::vector<std::string> graph_log;  // JSON lines, when enabled
};

double compute_reward(double beta_val, double alpha_val, RewardMode mode);

// Stepwise driver for the subspace-mining search; run_search wraps it.
class DsmSearch {
 public:
  DsmSearch(const TabularBenchmark& bench, const SearchConfig& config);

  // One sample/evaluate/update iteration. Returns false when the budget is
  // exhausted (the run then ends cleanly).
  bool step();

  SearchResult finish();

  const SubspaceGraph& graph() const { return *graph_; }
  Controller& controller() { return *controller_; }
  const Oracle& oracle() const { return oracle_; }
  double baseline() const { return baseline_; }

 private:
  const TabularBenchmark& bench_;
  SearchConfig config_;
  Oracle oracle_;
  Rng rng_;
  std::unique_ptr<Controller> controller_;
  std::unique_ptr<SubspaceGraph> graph_;
  double baseline_ = 0.0;
  std::size_t iteration_ = 0;
  std::size_t last_fresh_query_ = 0;
  std::set<Architecture> seen_centers_;
  std::vector<IterationRecord> trajectory_;
  std::vector<std::string> graph_log_;
  bool exhausted_ = false;

  void log_graph_state();
};

SearchResult run_search(const TabularBenchmark& bench, const SearchConfig& config);

}  // namespace dsm

#endif  // DSM_TRAINER_HPP
