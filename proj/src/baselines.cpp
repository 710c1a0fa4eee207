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

#include "dsm/baselines.hpp"

#include <optional>

#include "dsm/errors.hpp"
#include "dsm/nn/layers.hpp"

namespace dsm {

namespace {

// Shared bookkeeping: best-so-far tracking plus one trajectory record per
// consumed query.
struct BaselineRun {
  Oracle oracle;
  std::vector<IterationRecord> trajectory;
  std::optional<Architecture> best;
  double best_val = -1.0;
  std::size_t iteration = 0;

  BaselineRun(const TabularBenchmark& bench, std::size_t budget) : oracle(bench, budget) {}

  // Returns false once the budget is gone.
  bool evaluate(const Architecture& arch, int subspace = -1, bool updated = false) {
    const std::size_t used_before = oracle.budget().used;
    double val = 0.0;
    try {
      val = oracle.query_val(arch);
    } catch (const BudgetError&) {
      return false;
    }
    if (val > best_val) {
      best_val = val;
      best = arch;
    }
    if (oracle.budget().used > used_before) {
      IterationRecord record;
      record.iteration = iteration++;
      record.subspace = subspace;
      record.candidate = arch;
      record.candidate_val = val;
      record.reward = val;
      record.updated = updated;
      record.budget_used = oracle.budget().used;
      record.best_val = best_val;
      trajectory.push_back(std::move(record));
    }
    return true;
  }

  SearchResult finish(std::string algo) {
    SearchResult result;
    result.algo = std::move(algo);
    if (!best) throw ConfigError("baseline run evaluated no architecture");
    result.final_arch = *best;
    result.final_val = best_val;
    result.final_test = oracle.query_test(*best);
    result.queries_used = oracle.budget().used;
    result.trajectory = std::move(trajectory);
    return result;
  }
};

}  // namespace

SearchResult random_search(const TabularBenchmark& bench, std::size_t budget,
                           std::uint64_t seed) {
  if (budget < 1) throw ConfigError("budget must be at least 1");
  BaselineRun run(bench, budget);
  Rng rng(seed);
  while (!run.oracle.space_exhausted()) {
    if (!run.evaluate(random_architecture(bench.spec, rng))) break;
  }
  return run.finish("random");
}

SearchResult reinforce_whole_space(const TabularBenchmark& bench,
                                   const SearchConfig& config) {
  const SearchSpaceSpec& spec = bench.spec;
  spec.validate();
  const std::size_t length = spec.num_positions();
  const std::size_t d_e = config.controller.embed_dim;
  const std::size_t d_h = config.controller.hidden_dim;

  nn::ParamStore params;
  {
    Rng init_rng(config.seed ^ 0xc0ffee1234abcdefULL);
    for (std::size_t i = 0; i < length; ++i) {
      params.add("embed/pos" + std::to_string(i), {spec.candidates[i].size(), d_e}, init_rng);
    }
    nn::add_lstm_params(params, "lstm", d_e, d_h, init_rng);
    for (std::size_t i = 0; i < length; ++i) {
      params.add("head/op" + std::to_string(i), {spec.candidates[i].size(), d_h}, init_rng);
    }
  }

  BaselineRun run(bench, config.budget);
  Rng rng(config.seed);
  double baseline = 0.0;
  const std::size_t iteration_cap = 5 * config.budget;
  std::size_t last_fresh_query = 0;
  for (std::size_t it = 0; it < iteration_cap && !run.oracle.space_exhausted() &&
                           it - last_fresh_query <= config.budget;
       ++it) {
    nn::Tape tape;
    nn::TapeBinding binding(tape, params);
    nn::LstmWeights lstm = nn::bind_lstm(binding, "lstm");
    nn::LstmState state{tape.zeros({d_h}), tape.zeros({d_h})};
    nn::Tensor input = tape.zeros({d_e});

    Architecture arch;
    nn::Tensor log_prob_sum, entropy_sum;
    for (std::size_t i = 0; i < length; ++i) {
      state = nn::lstm_step(lstm, input, state);
      nn::Tensor logits =
          nn::matmul(binding.param("head/op" + std::to_string(i)), state.hidden);
      nn::CategoricalDraw draw = nn::categorical_sample(logits, rng);
      arch.codes.push_back(spec.candidates[i][draw.index]);
      log_prob_sum = log_prob_sum.valid() ? nn::add(log_prob_sum, draw.log_prob) : draw.log_prob;
      entropy_sum = entropy_sum.valid() ? nn::add(entropy_sum, draw.entropy) : draw.entropy;
      input = nn::row(binding.param("embed/pos" + std::to_string(i)), draw.index);
    }

    const std::size_t used_before = run.oracle.budget().used;
    if (!run.evaluate(arch)) break;
    if (run.oracle.budget().used > used_before) last_fresh_query = it;
    const double reward = run.oracle.query_val(arch);  // memoized, free

    const double advantage = config.use_baseline ? reward - baseline : reward;
    if (config.use_baseline) {
      baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * reward;
    }
    nn::Tensor loss = nn::add(nn::scale(log_prob_sum, -advantage),
                              nn::scale(entropy_sum, -config.entropy_weight));
    tape.backward(loss);
    nn::GradMap grads = binding.grads();
    nn::clip_global_norm(grads, config.grad_clip_norm);
    nn::AdamConfig adam;
    adam.learning_rate = config.learning_rate;
    params.adam_step(grads, adam);
  }
  return run.finish("reinforce");
}

SearchResult random_in_subspace(const TabularBenchmark& bench, std::size_t budget,
                                const Architecture& center, std::size_t local_distance,
                                std::uint64_t seed) {
  if (budget < 1) throw ConfigError("budget must be at least 1");
  const std::vector<Architecture> ball = enumerate_ball(bench.spec, center, local_distance);
  BaselineRun run(bench, budget);
  Rng rng(seed);
  while (run.oracle.distinct_queried() < ball.size()) {
    if (!run.evaluate(ball[rng.uniform_index(ball.size())])) break;
  }
  return run.finish("random-sub");
}

SearchResult random_with_subspace_update(const TabularBenchmark& bench, std::size_t budget,
                                         std::size_t num_subspaces,
                                         std::size_t local_distance, std::uint64_t seed) {
  if (num_subspaces < 1) throw ConfigError("K must be at least 1");
  if (budget < num_subspaces) {
    throw ConfigError("budget must cover the K initial center evaluations");
  }
  BaselineRun run(bench, budget);
  Rng rng(seed);

  std::vector<Architecture> centers;
  for (std::size_t i = 0; i < num_subspaces; ++i) {
    centers.push_back(random_architecture(bench.spec, rng));
    if (!run.evaluate(centers.back(), static_cast<int>(i))) {
      return run.finish("random-update");
    }
  }
  SubspaceGraph graph = [&] {
    std::vector<SubspaceNode> nodes;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      // Centers were just queried; memoized re-read is free.
      nodes.push_back({centers[i], run.oracle.query_val(centers[i]), static_cast<int>(i)});
    }
    return SubspaceGraph(std::move(nodes));
  }();

  std::vector<std::optional<std::vector<Architecture>>> balls(num_subspaces);
  const std::size_t iteration_cap = 50 * budget;
  for (std::size_t it = 0; it < iteration_cap && !run.oracle.space_exhausted(); ++it) {
    const int node_id = static_cast<int>(rng.uniform_index(num_subspaces));
    auto& ball = balls[node_id];
    if (!ball) ball = enumerate_ball(bench.spec, graph.node(node_id).center, local_distance);
    const Architecture& beta = (*ball)[rng.uniform_index(ball->size())];
    if (!run.evaluate(beta, node_id)) break;
    const double beta_val = run.oracle.query_val(beta);
    if (graph.update_center(node_id, beta, beta_val)) {
      ball.reset();
      if (!run.trajectory.empty()) run.trajectory.back().updated = true;
    }
  }
  return run.finish("random-update");
}

}  // namespace dsm
