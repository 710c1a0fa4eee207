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

#ifndef DSM_CONTROLLER_HPP
#define DSM_CONTROLLER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "dsm/nn/layers.hpp"
#include "dsm/nn/tensor.hpp"
#include "dsm/rng.hpp"
#include "dsm/search_space.hpp"
#include "dsm/subspace_graph.hpp"

namespace dsm {

struct ControllerConfig {
  std::size_t embed_dim = 8;    // per-position component embedding width
  std::size_t hidden_dim = 64;  // recurrent sampler width
  // When false, node features come from two dense layers on the node
  // embedding alone; the graph structure is ignored.
  bool use_graph = true;
};

// One policy decision: a subspace index plus an M-step modification, with
// the differentiable log-prob and entropy sums needed for REINFORCE.
struct PolicySample {
  int subspace = 0;
  Modification delta;
  nn::Tensor log_prob_sum;
  nn::Tensor entropy_sum;
  std::size_t term_count = 0;  // 1 global + 2 per local step
};

// Pre-decided choices for gradient-check replays: the subspace index and,
// per local step, (position index, candidate index at that position).
struct ForcedChoices {
  std::size_t subspace = 0;
  std::vector<std::pair<std::size_t, std::size_t>> steps;
};

// The learned policy over the subspace graph: per-position component
// embeddings, two message-passing rounds, an LSTM head that picks one of
// the K subspaces, and an LSTM sampler that emits the local modification.
class Controller {
 public:
  Controller(SearchSpaceSpec spec, std::size_t num_subspaces, ControllerConfig config,
             std::uint64_t seed);

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const ControllerConfig& config() const { return config_; }
  const SearchSpaceSpec& spec() const { return spec_; }
  std::size_t feature_dim() const { return spec_.num_positions() * config_.embed_dim; }

  // Concatenation of per-position code embeddings, dim L * embed_dim.
  nn::Tensor embed_architecture(nn::TapeBinding& binding, const Architecture& arch) const;

  // embed(to) - embed(from); zero slices exactly where positions agree.
  nn::Tensor edge_feature(nn::TapeBinding& binding, const Architecture& from,
                          const Architecture& to) const;

  // Per-node features after the two message-passing rounds (or the
  // pointwise dense path when use_graph is off).
  std::vector<nn::Tensor> graph_features(nn::TapeBinding& binding,
                                         const SubspaceGraph& graph) const;

  // Samples a subspace and an M-step modification. When forced is set the
  // draws are replayed instead of sampled (rng is untouched).
  PolicySample sample_policy(nn::TapeBinding& binding, const SubspaceGraph& graph,
                             std::size_t num_steps, Rng& rng,
                             const ForcedChoices* forced = nullptr) const;

  // Head shapes, one per line, for debugging.
  std::string describe() const;

 private:
  std::vector<nn::Tensor> graph_features_impl(nn::TapeBinding& binding,
                                              const SubspaceGraph& graph,
                                              std::vector<nn::Tensor>& embeds) const;

  SearchSpaceSpec spec_;
  std::size_t num_subspaces_;
  ControllerConfig config_;
  nn::ParamStore params_;
};

}  // namespace dsm

#endif  // DSM_CONTROLLER_HPP
