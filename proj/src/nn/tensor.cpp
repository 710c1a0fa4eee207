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

#include "dsm/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsm/errors.hpp"

namespace dsm::nn {

namespace {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void require(bool ok, const char* msg) {
  if (!ok) throw NumericError(msg);
}

}  // namespace

// Grants op implementations access to tape internals.
struct TapeOps {
  static Tape::Node& node(Tape* t, int id) { return t->node(id); }
  static Tensor emplace(Tape* t, Shape shape, std::vector<double> values,
                        std::function<void()> backward) {
    return t->emplace(std::move(shape), std::move(values), std::move(backward));
  }
  static Tape* same_tape(Tensor a, Tensor b) {
    require(a.valid() && b.valid() && a.tape() == b.tape(),
            "operands live on different tapes");
    return a.tape();
  }
};

const Shape& Tensor::shape() const { return tape_->node(id_).shape; }
const std::vector<double>& Tensor::values() const { return tape_->node(id_).value; }
const std::vector<double>& Tensor::grad() const { return tape_->node(id_).grad; }
std::size_t Tensor::size() const { return values().size(); }

double Tensor::scalar() const {
  require(size() == 1, "scalar() on a non-scalar tensor");
  return values()[0];
}

Tensor Tape::emplace(Shape shape, std::vector<double> values,
                     std::function<void()> backward) {
  require(shape_size(shape) == values.size(), "shape/value size mismatch");
  check_finite(values, "tensor");
  Node node;
  node.shape = std::move(shape);
  node.value = std::move(values);
  node.grad.assign(node.value.size(), 0.0);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::check_finite(const std::vector<double>& values, const char* op) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

Tensor Tape::leaf(Shape shape, std::vector<double> values) {
  return emplace(std::move(shape), std::move(values), nullptr);
}

Tensor Tape::zeros(Shape shape) {
  const std::size_t n = shape_size(shape);
  return leaf(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tape::scalar(double value) { return leaf({1}, {value}); }

void Tape::backward(Tensor root) {
  require(root.valid() && root.tape() == this, "backward on foreign tensor");
  require(root.size() == 1, "backward root must be scalar");
  for (Node& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  nodes_[root.id()].grad[0] = 1.0;
  for (int id = root.id(); id >= 0; --id) {
    if (nodes_[id].backward) nodes_[id].backward();
  }
}

// ---- elementwise binary ----

namespace {

template <typename Fwd, typename Bwd>
Tensor binary_same_shape(Tensor a, Tensor b, const char* name, Fwd fwd, Bwd bwd) {
  Tape* t = TapeOps::same_tape(a, b);
  require(a.shape() == b.shape(), "shape mismatch in elementwise op");
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i], bv[i]);
  const int aid = a.id(), bid = b.id();
  Tensor result = TapeOps::emplace(t, a.shape(), std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, bid, rid, bwd]() {
    auto& an = TapeOps::node(t, aid);
    auto& bn = TapeOps::node(t, bid);
    const auto& rn = TapeOps::node(t, rid);
    for (std::size_t i = 0; i < rn.grad.size(); ++i) {
      bwd(rn.grad[i], an.value[i], bn.value[i], an.grad[i], bn.grad[i]);
    }
  };
  (void)name;
  return result;
}

template <typename Fwd, typename Deriv>
Tensor unary_elementwise(Tensor a, const char* name, Fwd fwd, Deriv deriv) {
  Tape* t = a.tape();
  require(t != nullptr, "op on empty tensor handle");
  const auto& av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, a.shape(), std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid, deriv]() {
    auto& an = TapeOps::node(t, aid);
    const auto& rn = TapeOps::node(t, rid);
    for (std::size_t i = 0; i < rn.grad.size(); ++i) {
      an.grad[i] += rn.grad[i] * deriv(an.value[i], rn.value[i]);
    }
  };
  (void)name;
  return result;
}

}  // namespace

Tensor add(Tensor a, Tensor b) {
  return binary_same_shape(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double g, double, double, double& ga, double& gb) {
        ga += g;
        gb += g;
      });
}

Tensor sub(Tensor a, Tensor b) {
  return binary_same_shape(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double, double& ga, double& gb) {
        ga += g;
        gb -= g;
      });
}

Tensor mul(Tensor a, Tensor b) {
  return binary_same_shape(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double g, double x, double y, double& ga, double& gb) {
        ga += g * y;
        gb += g * x;
      });
}

Tensor scale(Tensor a, double c) {
  return unary_elementwise(
      a, "scale", [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Tensor tanh_op(Tensor a) {
  return unary_elementwise(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(Tensor a) {
  return unary_elementwise(
      a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(Tensor a) {
  return unary_elementwise(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor log_op(Tensor a) {
  for (double v : a.values()) {
    if (v <= 0.0) throw NumericError("log of non-positive value");
  }
  return unary_elementwise(
      a, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor matmul(Tensor a, Tensor b) {
  Tape* t = TapeOps::same_tape(a, b);
  require(a.shape().size() == 2, "matmul lhs must be a matrix");
  const std::size_t m = a.shape()[0], k = a.shape()[1];
  const bool vec = b.shape().size() == 1;
  const std::size_t bk = b.shape()[0];
  const std::size_t n = vec ? 1 : b.shape()[1];
  require(bk == k, "matmul inner dimension mismatch");

  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * bv[p * n + j];
    }
  }
  Shape out_shape = vec ? Shape{m} : Shape{m, n};
  const int aid = a.id(), bid = b.id();
  Tensor result = TapeOps::emplace(t, std::move(out_shape), std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, bid, rid, m, k, n]() {
    auto& an = TapeOps::node(t, aid);
    auto& bn = TapeOps::node(t, bid);
    const auto& rn = TapeOps::node(t, rid);
    // dA = dC * B^T ; dB = A^T * dC
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += rn.grad[i * n + j] * bn.value[p * n + j];
        an.grad[i * k + p] += acc;
      }
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += an.value[i * k + p] * rn.grad[i * n + j];
        bn.grad[p * n + j] += acc;
      }
    }
  };
  return result;
}

Tensor concat(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat of nothing");
  Tape* t = parts[0].tape();
  std::vector<double> out;
  std::vector<int> ids;
  std::vector<std::size_t> sizes;
  for (const Tensor& p : parts) {
    require(p.tape() == t, "concat across tapes");
    require(p.shape().size() == 1, "concat expects vectors");
    out.insert(out.end(), p.values().begin(), p.values().end());
    ids.push_back(p.id());
    sizes.push_back(p.size());
  }
  const std::size_t total = out.size();
  Tensor result = TapeOps::emplace(t, Shape{total}, std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, ids, sizes, rid]() {
    const auto& rn = TapeOps::node(t, rid);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      auto& pn = TapeOps::node(t, ids[p]);
      for (std::size_t i = 0; i < sizes[p]; ++i) pn.grad[i] += rn.grad[offset + i];
      offset += sizes[p];
    }
  };
  return result;
}

Tensor slice(Tensor a, std::size_t start, std::size_t len) {
  Tape* t = a.tape();
  require(a.shape().size() == 1, "slice expects a vector");
  require(start + len <= a.size(), "slice out of range");
  std::vector<double> out(a.values().begin() + start, a.values().begin() + start + len);
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, Shape{len}, std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid, start, len]() {
    auto& an = TapeOps::node(t, aid);
    const auto& rn = TapeOps::node(t, rid);
    for (std::size_t i = 0; i < len; ++i) an.grad[start + i] += rn.grad[i];
  };
  return result;
}

Tensor softmax(Tensor a) {
  Tape* t = a.tape();
  require(a.shape().size() == 1, "softmax expects a vector");
  const auto& av = a.values();
  const double mx = *std::max_element(av.begin(), av.end());
  std::vector<double> out(av.size());
  double z = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) z += out[i] = std::exp(av[i] - mx);
  for (double& v : out) v /= z;
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, a.shape(), std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid]() {
    auto& an = TapeOps::node(t, aid);
    const auto& rn = TapeOps::node(t, rid);
    double dot = 0.0;
    for (std::size_t i = 0; i < rn.grad.size(); ++i) dot += rn.grad[i] * rn.value[i];
    for (std::size_t i = 0; i < rn.grad.size(); ++i) {
      an.grad[i] += rn.value[i] * (rn.grad[i] - dot);
    }
  };
  return result;
}

Tensor log_softmax(Tensor a) {
  Tape* t = a.tape();
  require(a.shape().size() == 1, "log_softmax expects a vector");
  const auto& av = a.values();
  const double mx = *std::max_element(av.begin(), av.end());
  double z = 0.0;
  for (double v : av) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - lse;
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, a.shape(), std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid]() {
    auto& an = TapeOps::node(t, aid);
    const auto& rn = TapeOps::node(t, rid);
    double gsum = 0.0;
    for (double g : rn.grad) gsum += g;
    for (std::size_t i = 0; i < rn.grad.size(); ++i) {
      an.grad[i] += rn.grad[i] - std::exp(rn.value[i]) * gsum;
    }
  };
  return result;
}

Tensor sum(Tensor a) {
  Tape* t = a.tape();
  const double total = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, Shape{1}, {total}, nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid]() {
    auto& an = TapeOps::node(t, aid);
    const double g = TapeOps::node(t, rid).grad[0];
    for (double& ga : an.grad) ga += g;
  };
  return result;
}

Tensor mean(Tensor a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor pick(Tensor a, std::size_t index) {
  Tape* t = a.tape();
  require(a.shape().size() == 1, "pick expects a vector");
  require(index < a.size(), "pick index out of range");
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, Shape{1}, {a.values()[index]}, nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid, index]() {
    TapeOps::node(t, aid).grad[index] += TapeOps::node(t, rid).grad[0];
  };
  return result;
}

Tensor row(Tensor a, std::size_t index) {
  Tape* t = a.tape();
  require(a.shape().size() == 2, "row expects a matrix");
  const std::size_t rows = a.shape()[0], cols = a.shape()[1];
  require(index < rows, "row index out of range");
  std::vector<double> out(a.values().begin() + index * cols,
                          a.values().begin() + (index + 1) * cols);
  const int aid = a.id();
  Tensor result = TapeOps::emplace(t, Shape{cols}, std::move(out), nullptr);
  const int rid = result.id();
  TapeOps::node(t, rid).backward = [t, aid, rid, index, cols]() {
    auto& an = TapeOps::node(t, aid);
    const auto& rn = TapeOps::node(t, rid);
    for (std::size_t i = 0; i < cols; ++i) an.grad[index * cols + i] += rn.grad[i];
  };
  return result;
}

}  // namespace dsm::nn
