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

#ifndef DSM_NN_TENSOR_HPP
#define DSM_NN_TENSOR_HPP

#include <functional>
#include <string>
#include <vector>

namespace dsm::nn {

using Shape = std::vector<std::size_t>;

class Tape;

// Lightweight handle into a tape node. Values live on the tape; copies of a
// Tensor alias the same node.
class Tensor {
 public:
  Tensor() = default;

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Shape& shape() const;
  const std::vector<double>& values() const;
  const std::vector<double>& grad() const;
  std::size_t size() const;
  double scalar() const;  // value of a single-element tensor

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Double precision; every op checks its outputs for
// NaN/Inf and throws NumericError. One tape per forward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor leaf(Shape shape, std::vector<double> values);
  Tensor zeros(Shape shape);
  Tensor scalar(double value);

  // Accumulates d(root)/d(node) into every node's grad. root must be a
  // scalar. Grads are zeroed first, so repeated calls are idempotent.
  void backward(Tensor root);

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  friend class Tensor;
  friend struct TapeOps;

  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void()> backward;  // empty for leaves
  };

  std::vector<Node> nodes_;

  Node& node(int id) { return nodes_[id]; }
  const Node& node(int id) const { return nodes_[id]; }
  Tensor emplace(Shape shape, std::vector<double> values, std::function<void()> backward);
  void check_finite(const std::vector<double>& values, const char* op);
};

// ---- Ops. Arguments must live on the same tape. ----

Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);  // elementwise
Tensor scale(Tensor a, double c);

// [m,k] x [k,n] -> [m,n]; also [m,k] x [k] -> [m].
Tensor matmul(Tensor a, Tensor b);

Tensor concat(const std::vector<Tensor>& parts);  // vectors
Tensor slice(Tensor a, std::size_t start, std::size_t len);  // vector

Tensor tanh_op(Tensor a);
Tensor sigmoid(Tensor a);
Tensor relu(Tensor a);
Tensor log_op(Tensor a);  // elementwise; domain error on non-positive input

Tensor softmax(Tensor a);      // vector
Tensor log_softmax(Tensor a);  // vector, numerically stable

Tensor sum(Tensor a);
Tensor mean(Tensor a);
Tensor pick(Tensor a, std::size_t index);  // vector -> scalar
Tensor row(Tensor a, std::size_t index);   // matrix -> vector (its row)

}  // namespace dsm::nn

#endif  // DSM_NN_TENSOR_HPP
