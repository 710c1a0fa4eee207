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

#include "dsm/trainer.hpp"

#include <json.hpp>

#include "dsm/errors.hpp"

namespace dsm {

void SearchConfig::validate(const SearchSpaceSpec& spec) const {
  if (num_subspaces < 1) throw ConfigError("K must be at least 1");
  if (local_distance < 1 || local_distance > spec.num_positions()) {
    throw ConfigError("M must be in [1, L]");
  }
  if (budget < num_subspaces) {
    throw ConfigError("budget must cover the K initial center evaluations");
  }
  if (!(entropy_weight >= 0.0)) throw ConfigError("entropy weight must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) {
    throw ConfigError("baseline decay must be in [0, 1)");
  }
  for (const Architecture& arch : warm_start) validate_architecture(spec, arch);
  if (warm_start.size() > num_subspaces) {
    throw ConfigError("more warm-start centers than subspaces");
  }
}

double compute_reward(double beta_val, double alpha_val, RewardMode mode) {
  return mode == RewardMode::kImprovement ? beta_val - alpha_val : beta_val;
}

DsmSearch::DsmSearch(const TabularBenchmark& bench, const SearchConfig& config)
    : bench_(bench), config_(config), oracle_(bench, config.budget), rng_(config.seed) {
  config_.validate(bench_.spec);
  config_.controller.use_graph = config_.use_graph;

  std::vector<Architecture> centers = config_.warm_start;
  while (centers.size() < config_.num_subspaces) {
    centers.push_back(random_architecture(bench_.spec, rng_));
  }
  // Distinct seed stream for parameter init so center draws stay stable
  // across controller-shape changes.
  controller_ = std::make_unique<Controller>(bench_.spec, config_.num_subspaces,
                                             config_.controller,
                                             config_.seed ^ 0xc0ffee1234abcdefULL);
  graph_ = std::make_unique<SubspaceGraph>(SubspaceGraph::init(
      centers, oracle_, config_.edge_rule, config_.edge_nearest_k));
  for (const auto& node : graph_->nodes()) seen_centers_.insert(node.center);
  if (config_.log_graph) log_graph_state();
}

void DsmSearch::log_graph_state() {
  nlohmann::json record;
  record["iteration"] = iteration_;
  auto& nodes = record["nodes"] = nlohmann::json::array();
  for (const auto& node : graph_->nodes()) {
    nodes.push_back({{"id", node.id}, {"center", to_text(node.center)},
                     {"val_metric", node.val_metric}});
  }
  auto& edges = record["edges"] = nlohmann::json::array();
  for (const auto& [src, dst] : graph_->edges()) edges.push_back({src, dst});
  graph_log_.push_back(record.dump());
}

bool DsmSearch::step() {
  if (exhausted_) return false;
  // Once the policy concentrates, memoized repeats stop consuming budget
  // and a pure budget condition would spin forever. Stop after a full
  // budget's worth of iterations without a fresh query.
  const std::size_t iteration_cap = 5 * config_.budget;
  if (iteration_ >= iteration_cap || oracle_.space_exhausted() ||
      iteration_ - last_fresh_query_ > config_.budget) {
    exhausted_ = true;
    return false;
  }

  nn::Tape tape;
  nn::TapeBinding binding(tape, controller_->params());
  PolicySample sample =
      controller_->sample_policy(binding, *graph_, config_.local_distance, rng_);

  const SubspaceNode& node = graph_->node(sample.subspace);
  const Architecture alpha = node.center;
  const double alpha_val = node.val_metric;
  const Architecture beta = apply_modification(bench_.spec, alpha, sample.delta);

  double beta_val = 0.0;
  const std::size_t used_before = oracle_.budget().used;
  try {
    beta_val = oracle_.query_val(beta);
  } catch (const BudgetError&) {
    exhausted_ = true;
    return false;
  }
  if (oracle_.budget().used > used_before) last_fresh_query_ = iteration_;

  const double reward = compute_reward(beta_val, alpha_val, config_.reward_mode);
  const double advantage = config_.use_baseline ? reward - baseline_ : reward;
  if (config_.use_baseline) {
    baseline_ = config_.baseline_decay * baseline_ +
                (1.0 - config_.baseline_decay) * reward;
  }

  nn::Tensor loss = nn::add(nn::scale(sample.log_prob_sum, -advantage),
                            nn::scale(sample.entropy_sum, -config_.entropy_weight));
  tape.backward(loss);
  nn::GradMap grads = binding.grads();
  nn::clip_global_norm(grads, config_.grad_clip_norm);
  nn::AdamConfig adam;
  adam.learning_rate = config_.learning_rate;
  controller_->params().adam_step(grads, adam);

  // Center replacement needs a strict val improvement in either reward
  // mode, so the reward ablation isolates the learning signal only.
  bool updated = false;
  if (config_.subspace_update && beta_val > alpha_val) {
    updated = graph_->update_center(sample.subspace, beta, beta_val);
    if (updated) seen_centers_.insert(beta);
  }

  IterationRecord record;
  record.iteration = iteration_;
  record.subspace = sample.subspace;
  record.center = alpha;
  record.candidate = beta;
  record.candidate_val = beta_val;
  record.reward = reward;
  record.updated = updated;
  record.budget_used = oracle_.budget().used;
  record.best_val = graph_->best_center().second;
  trajectory_.push_back(std::move(record));
  ++iteration_;
  if (config_.log_graph) log_graph_state();
  return true;
}

SearchResult DsmSearch::finish() {
  SearchResult result;
  result.algo = config_.warm_start.empty() ? "dsm" : "dsm-plus";
  auto [best, best_val] = graph_->best_center();
  result.final_arch = best;
  result.final_val = best_val;
  result.final_test = oracle_.query_test(best);
  result.queries_used = oracle_.budget().used;
  result.distinct_centers = seen_centers_.size();
  result.trajectory = std::move(trajectory_);
  result.graph_log = std::move(graph_log_);
  return result;
}

SearchResult run_search(const TabularBenchmark& bench, const SearchConfig& config) {
  DsmSearch search(bench, config);
  while (search.step()) {
  }
  return search.finish();
}

}  // namespace dsm
