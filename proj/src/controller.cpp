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

#include "dsm/controller.hpp"

#include <map>
#include <sstream>
#include <utility>

#include "dsm/errors.hpp"

namespace dsm {

using nn::Tensor;

Controller::Controller(SearchSpaceSpec spec, std::size_t num_subspaces,
                       ControllerConfig config, std::uint64_t seed)
    : spec_(std::move(spec)), num_subspaces_(num_subspaces), config_(config) {
  spec_.validate();
  if (num_subspaces_ == 0) throw ConfigError("controller needs at least one subspace");
  const std::size_t length = spec_.num_positions();
  const std::size_t d_e = config_.embed_dim;
  const std::size_t d_f = length * d_e;  // node feature width
  const std::size_t d_h = config_.hidden_dim;

  // Registration order is fixed so a seed pins every initial value.
  Rng rng(seed);
  for (std::size_t i = 0; i < length; ++i) {
    params_.add("embed/pos" + std::to_string(i), {spec_.candidates[i].size(), d_e}, rng);
  }
  params_.add("embed/position", {length, d_e}, rng);
  for (int layer : {1, 2}) {
    const std::string p = "gnn" + std::to_string(layer);
    params_.add(p + "/self", {d_f, d_f}, rng);
    params_.add(p + "/nbr", {d_f, d_f}, rng);
    params_.add(p + "/edge", {d_f, d_f}, rng);
  }
  nn::add_lstm_params(params_, "lstm_g", d_f, d_h, rng);
  nn::add_lstm_params(params_, "lstm_l", 2 * d_e, d_h, rng);
  params_.add("init/proj", {d_h, 2 * d_f}, rng);
  params_.add("head/global", {num_subspaces_, d_h}, rng);
  params_.add("head/position", {length, d_h}, rng);
  for (std::size_t i = 0; i < length; ++i) {
    params_.add("head/op" + std::to_string(i), {spec_.candidates[i].size(), d_h}, rng);
  }
}

Tensor Controller::embed_architecture(nn::TapeBinding& binding,
                                      const Architecture& arch) const {
  validate_architecture(spec_, arch);
  std::vector<Tensor> slices;
  slices.reserve(arch.codes.size());
  for (std::size_t i = 0; i < arch.codes.size(); ++i) {
    Tensor table = binding.param("embed/pos" + std::to_string(i));
    slices.push_back(nn::row(table, spec_.code_index(i, arch.codes[i])));
  }
  return nn::concat(slices);
}

Tensor Controller::edge_feature(nn::TapeBinding& binding, const Architecture& from,
                                const Architecture& to) const {
  return nn::sub(embed_architecture(binding, to), embed_architecture(binding, from));
}

std::vector<Tensor> Controller::graph_features(nn::TapeBinding& binding,
                                               const SubspaceGraph& graph) const {
  std::vector<Tensor> embeds;
  return graph_features_impl(binding, graph, embeds);
}

std::vector<Tensor> Controller::graph_features_impl(nn::TapeBinding& binding,
                                                    const SubspaceGraph& graph,
                                                    std::vector<Tensor>& embeds) const {
  const std::size_t k = graph.size();
  embeds.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    embeds[i] = embed_architecture(binding, graph.node(i).center);
  }
  // Edge features stay fixed at raw embedding differences across layers.
  std::map<std::pair<int, int>, Tensor> edge_feats;
  if (config_.use_graph) {
    for (const auto& [src, dst] : graph.edges()) {
      edge_feats.emplace(std::make_pair(src, dst), nn::sub(embeds[dst], embeds[src]));
    }
  }

  std::vector<Tensor> features = embeds;
  for (int layer : {1, 2}) {
    const std::string p = "gnn" + std::to_string(layer);
    Tensor w_self = binding.param(p + "/self");
    Tensor w_nbr = binding.param(p + "/nbr");
    Tensor w_edge = binding.param(p + "/edge");
    std::vector<Tensor> next(k);
    for (std::size_t i = 0; i < k; ++i) {
      Tensor combined = nn::matmul(w_self, features[i]);
      if (config_.use_graph) {
        const std::vector<int> sources = graph.incoming(static_cast<int>(i));
        if (!sources.empty()) {
          Tensor agg;
          for (int src : sources) {
            Tensor e = edge_feats.at({src, static_cast<int>(i)});
            Tensor msg = nn::add(nn::matmul(w_nbr, features[src]), nn::matmul(w_edge, e));
            agg = agg.valid() ? nn::add(agg, msg) : msg;
          }
          combined = nn::add(combined, nn::scale(agg, 1.0 / sources.size()));
        }
      }
      next[i] = nn::relu(combined);
    }
    features = std::move(next);
  }
  return features;
}

PolicySample Controller::sample_policy(nn::TapeBinding& binding, const SubspaceGraph& graph,
                                       std::size_t num_steps, Rng& rng,
                                       const ForcedChoices* forced) const {
  if (graph.size() != num_subspaces_) {
    throw ConfigError("graph has " + std::to_string(graph.size()) + " nodes, controller built for " +
                      std::to_string(num_subspaces_));
  }
  nn::Tape& tape = binding.tape();
  const std::size_t d_h = config_.hidden_dim;
  std::vector<Tensor> embeds;
  std::vector<Tensor> features = graph_features_impl(binding, graph, embeds);

  // Global step: pooled node features -> LSTM -> K-way head.
  Tensor pooled = features[0];
  for (std::size_t i = 1; i < features.size(); ++i) pooled = nn::add(pooled, features[i]);
  pooled = nn::scale(pooled, 1.0 / features.size());

  nn::LstmWeights lstm_g = nn::bind_lstm(binding, "lstm_g");
  nn::LstmState state_g{tape.zeros({d_h}), tape.zeros({d_h})};
  state_g = nn::lstm_step(lstm_g, pooled, state_g);
  Tensor global_logits = nn::matmul(binding.param("head/global"), state_g.hidden);
  nn::CategoricalDraw global =
      forced ? nn::categorical_forced(global_logits, forced->subspace)
             : nn::categorical_sample(global_logits, rng);

  PolicySample sample;
  sample.subspace = static_cast<int>(global.index);
  sample.log_prob_sum = global.log_prob;
  sample.entropy_sum = global.entropy;
  sample.term_count = 1;

  // Local sampler starts from the chosen node's feature and center.
  Tensor seed = nn::concat({features[global.index], embeds[global.index]});
  nn::LstmState state_l{nn::tanh_op(nn::matmul(binding.param("init/proj"), seed)),
                        tape.zeros({d_h})};
  nn::LstmWeights lstm_l = nn::bind_lstm(binding, "lstm_l");
  Tensor position_table = binding.param("embed/position");
  Tensor head_position = binding.param("head/position");

  Tensor input = tape.zeros({2 * config_.embed_dim});
  for (std::size_t step = 0; step < num_steps; ++step) {
    state_l = nn::lstm_step(lstm_l, input, state_l);
    Tensor pos_logits = nn::matmul(head_position, state_l.hidden);
    nn::CategoricalDraw pos_draw =
        forced ? nn::categorical_forced(pos_logits, forced->steps.at(step).first)
               : nn::categorical_sample(pos_logits, rng);
    const std::size_t position = pos_draw.index;

    Tensor op_logits =
        nn::matmul(binding.param("head/op" + std::to_string(position)), state_l.hidden);
    nn::CategoricalDraw op_draw =
        forced ? nn::categorical_forced(op_logits, forced->steps.at(step).second)
               : nn::categorical_sample(op_logits, rng);
    const int code = spec_.candidates[position][op_draw.index];

    sample.delta.steps.push_back({position, code});
    sample.log_prob_sum = nn::add(sample.log_prob_sum, nn::add(pos_draw.log_prob, op_draw.log_prob));
    sample.entropy_sum = nn::add(sample.entropy_sum, nn::add(pos_draw.entropy, op_draw.entropy));
    sample.term_count += 2;

    input = nn::concat({nn::row(position_table, position),
                        nn::row(binding.param("embed/pos" + std::to_string(position)),
                                op_draw.index)});
  }
  return sample;
}

std::string Controller::describe() const {
  std::ostringstream out;
  for (const auto& [name, entry] : params_.entries()) {
    out << name << " [";
    for (std::size_t i = 0; i < entry.shape.size(); ++i) {
      if (i) out << 'x';
      out << entry.shape[i];
    }
    out << "]\n";
  }
  return out.str();
}

}  // namespace dsm
