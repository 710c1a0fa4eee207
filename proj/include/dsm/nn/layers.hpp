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

#ifndef DSM_NN_LAYERS_HPP
#define DSM_NN_LAYERS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsm/nn/tensor.hpp"
#include "dsm/rng.hpp"

namespace dsm::nn {

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using GradMap = std::map<std::string, std::vector<double>>;

// Named parameters with per-parameter Adam moments and a shared step
// counter. Values are plain arrays; a TapeBinding lifts them onto a tape
// for one forward/backward pass.
class ParamStore {
 public:
  struct Entry {
    Shape shape;
    std::vector<double> value;
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
  };

  // Registers a parameter initialized uniform(-range, range). Throws
  // ConfigError on duplicate names.
  std::vector<double>& add(const std::string& name, Shape shape, Rng& rng,
                           double range = 0.1);

  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::int64_t step() const { return step_; }

  // Bias-corrected Adam update. Missing grads are treated as zero; a
  // non-finite grad aborts the whole step with NumericError.
  void adam_step(const GradMap& grads, const AdamConfig& cfg);

  // Text checkpoint; load/save round-trips values, moments, and the step
  // counter exactly.
  void save(const std::string& path) const;
  static ParamStore load(const std::string& path);

 private:
  std::map<std::string, Entry> entries_;
  std::int64_t step_ = 0;
};

// Scales grads in place so the global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_norm(GradMap& grads, double max_norm);

// Per-forward-pass view of a ParamStore: lifts parameters onto a tape
// (once per name) and collects their grads after backward.
class TapeBinding {
 public:
  TapeBinding(Tape& tape, const ParamStore& store) : tape_(tape), store_(store) {}

  Tape& tape() { return tape_; }
  Tensor param(const std::string& name);

  // Grad of every parameter touched this pass. Call after Tape::backward.
  GradMap grads() const;

 private:
  Tape& tape_;
  const ParamStore& store_;
  std::map<std::string, Tensor> bound_;
};

// Gated recurrent update, gates packed [input, forget, cell, output].
struct LstmWeights {
  Tensor w_input;   // [4H, X]
  Tensor w_hidden;  // [4H, H]
  Tensor bias;      // [4H]
};

struct LstmState {
  Tensor hidden;
  Tensor cell;
};

// Registers lstm weights "<prefix>/wx|wh|b" in a store.
void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                     std::size_t hidden_dim, Rng& rng);
LstmWeights bind_lstm(TapeBinding& binding, const std::string& prefix);
LstmState lstm_step(const LstmWeights& w, Tensor input, const LstmState& state);

struct CategoricalDraw {
  std::size_t index = 0;
  Tensor log_prob;  // differentiable w.r.t. the logits
  Tensor entropy;   // -sum p log p
};

// index ~ softmax(logits).
CategoricalDraw categorical_sample(Tensor logits, Rng& rng);
// log-prob/entropy for an externally chosen index (replay path).
CategoricalDraw categorical_forced(Tensor logits, std::size_t index);

}  // namespace dsm::nn

#endif  // DSM_NN_LAYERS_HPP
