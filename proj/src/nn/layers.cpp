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

#include "dsm/nn/layers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsm/errors.hpp"

namespace dsm::nn {

std::vector<double>& ParamStore::add(const std::string& name, Shape shape, Rng& rng,
                                     double range) {
  if (entries_.count(name)) throw ConfigError("duplicate parameter " + name);
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  Entry entry;
  entry.shape = std::move(shape);
  entry.value.resize(n);
  for (double& v : entry.value) v = rng.uniform(-range, range);
  entry.m.assign(n, 0.0);
  entry.v.assign(n, 0.0);
  return entries_.emplace(name, std::move(entry)).first->second.value;
}

ParamStore::Entry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter " + name);
  return it->second;
}

const ParamStore::Entry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown parameter " + name);
  return it->second;
}

void ParamStore::adam_step(const GradMap& grads, const AdamConfig& cfg) {
  for (const auto& [name, grad] : grads) {
    for (double g : grad) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient for parameter " + name + "; step aborted");
      }
    }
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (auto& [name, entry] : entries_) {
    auto it = grads.find(name);
    if (it == grads.end()) continue;
    const auto& grad = it->second;
    if (grad.size() != entry.value.size()) {
      throw NumericError("gradient shape mismatch for parameter " + name);
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
      entry.m[i] = cfg.beta1 * entry.m[i] + (1.0 - cfg.beta1) * grad[i];
      entry.v[i] = cfg.beta2 * entry.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
      const double m_hat = entry.m[i] / bc1;
      const double v_hat = entry.v[i] / bc2;
      entry.value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

namespace {

void write_array(std::ofstream& out, const std::vector<double>& values) {
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    if (i) out << ' ';
    out << buf;
  }
  out << '\n';
}

std::vector<double> read_array(std::ifstream& in, std::size_t n, const std::string& path) {
  std::vector<double> values(n);
  for (double& v : values) {
    if (!(in >> v)) throw DataError("truncated checkpoint " + path);
  }
  return values;
}

}  // namespace

void ParamStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << "dsm-params v1 " << entries_.size() << ' ' << step_ << '\n';
  for (const auto& [name, entry] : entries_) {
    out << name << ' ' << entry.shape.size();
    for (std::size_t d : entry.shape) out << ' ' << d;
    out << '\n';
    write_array(out, entry.value);
    write_array(out, entry.m);
    write_array(out, entry.v);
  }
  if (!out) throw DataError("write failure on " + path);
}

ParamStore ParamStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::string magic, version;
  std::size_t count = 0;
  ParamStore store;
  if (!(in >> magic >> version >> count >> store.step_) || magic != "dsm-params" ||
      version != "v1") {
    throw DataError("bad checkpoint header in " + path);
  }
  for (std::size_t p = 0; p < count; ++p) {
    std::string name;
    std::size_t ndim = 0;
    if (!(in >> name >> ndim)) throw DataError("truncated checkpoint " + path);
    Entry entry;
    entry.shape.resize(ndim);
    std::size_t n = 1;
    for (std::size_t& d : entry.shape) {
      if (!(in >> d)) throw DataError("truncated checkpoint " + path);
      n *= d;
    }
    entry.value = read_array(in, n, path);
    entry.m = read_array(in, n, path);
    entry.v = read_array(in, n, path);
    store.entries_.emplace(name, std::move(entry));
  }
  return store;
}

double clip_global_norm(GradMap& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, grad] : grads) {
    for (double g : grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (auto& [name, grad] : grads) {
      for (double& g : grad) g *= factor;
    }
  }
  return norm;
}

Tensor TapeBinding::param(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  const auto& entry = store_.at(name);
  Tensor tensor = tape_.leaf(entry.shape, entry.value);
  bound_.emplace(name, tensor);
  return tensor;
}

GradMap TapeBinding::grads() const {
  GradMap out;
  for (const auto& [name, tensor] : bound_) out.emplace(name, tensor.grad());
  return out;
}

void add_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                     std::size_t hidden_dim, Rng& rng) {
  store.add(prefix + "/wx", {4 * hidden_dim, input_dim}, rng);
  store.add(prefix + "/wh", {4 * hidden_dim, hidden_dim}, rng);
  store.add(prefix + "/b", {4 * hidden_dim}, rng);
}

LstmWeights bind_lstm(TapeBinding& binding, const std::string& prefix) {
  return {binding.param(prefix + "/wx"), binding.param(prefix + "/wh"),
          binding.param(prefix + "/b")};
}

LstmState lstm_step(const LstmWeights& w, Tensor input, const LstmState& state) {
  const std::size_t hidden_dim = state.hidden.size();
  Tensor pre = add(add(matmul(w.w_input, input), matmul(w.w_hidden, state.hidden)), w.bias);
  Tensor gate_in = sigmoid(slice(pre, 0, hidden_dim));
  Tensor gate_forget = sigmoid(slice(pre, hidden_dim, hidden_dim));
  Tensor gate_cell = tanh_op(slice(pre, 2 * hidden_dim, hidden_dim));
  Tensor gate_out = sigmoid(slice(pre, 3 * hidden_dim, hidden_dim));
  Tensor cell = add(mul(gate_forget, state.cell), mul(gate_in, gate_cell));
  Tensor hidden = mul(gate_out, tanh_op(cell));
  return {hidden, cell};
}

namespace {

CategoricalDraw draw_at(Tensor logits, std::size_t index) {
  Tensor logp = log_softmax(logits);
  CategoricalDraw draw;
  draw.index = index;
  draw.log_prob = pick(logp, index);
  draw.entropy = scale(sum(mul(softmax(logits), logp)), -1.0);
  return draw;
}

}  // namespace

CategoricalDraw categorical_sample(Tensor logits, Rng& rng) {
  const auto& lv = logits.values();
  for (double v : lv) {
    if (!std::isfinite(v)) throw NumericError("non-finite logits in categorical sample");
  }
  // Inverse-CDF over the softmax probabilities.
  double mx = lv[0];
  for (double v : lv) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : lv) z += std::exp(v - mx);
  const double u = rng.uniform01() * z;
  double acc = 0.0;
  std::size_t index = lv.size() - 1;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    acc += std::exp(lv[i] - mx);
    if (u < acc) {
      index = i;
      break;
    }
  }
  return draw_at(logits, index);
}

CategoricalDraw categorical_forced(Tensor logits, std::size_t index) {
  if (index >= logits.size()) throw NumericError("forced index out of range");
  return draw_at(logits, index);
}

}  // namespace dsm::nn
