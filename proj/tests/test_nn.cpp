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

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include <doctest.h>

#include "dsm/errors.hpp"
#include "dsm/nn/layers.hpp"
#include "dsm/nn/tensor.hpp"
#include "dsm/rng.hpp"

namespace {

using namespace dsm;
using nn::Tape;
using nn::Tensor;

struct LeafSpec {
  nn::Shape shape;
  std::vector<double> values;
};

using Forward = std::function<Tensor(Tape&, const std::vector<Tensor>&)>;

// Central-difference gradient check of a scalar-valued graph against the
// tape's reverse pass. Step 1e-4; relative error bound 1e-4.
void check_gradients(std::vector<LeafSpec> leaves, const Forward& forward) {
  auto evaluate = [&](const std::vector<LeafSpec>& inputs) {
    Tape tape;
    std::vector<Tensor> bound;
    for (const LeafSpec& leaf : inputs) bound.push_back(tape.leaf(leaf.shape, leaf.values));
    return forward(tape, bound).scalar();
  };

  Tape tape;
  std::vector<Tensor> bound;
  for (const LeafSpec& leaf : leaves) bound.push_back(tape.leaf(leaf.shape, leaf.values));
  Tensor loss = forward(tape, bound);
  tape.backward(loss);

  const double step = 1e-4;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (std::size_t i = 0; i < leaves[l].values.size(); ++i) {
      std::vector<LeafSpec> bumped = leaves;
      bumped[l].values[i] += step;
      const double up = evaluate(bumped);
      bumped[l].values[i] -= 2.0 * step;
      const double down = evaluate(bumped);
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = bound[l].grad()[i];
      const double scale_ref = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      CHECK(std::abs(numeric - analytic) / scale_ref <= 1e-4);
    }
  }
}

std::vector<double> random_values(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.uniform(lo, hi);
  return out;
}

}  // namespace

TEST_CASE("softmax normalizes to 1") {
  Tape tape;
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = tape.leaf({7}, random_values(7, rng, -20.0, 20.0));
    const std::vector<double>& p = nn::softmax(x).values();
    double total = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("matmul matches a hand-computed 2x2 case") {
  Tape tape;
  Tensor a = tape.leaf({2, 2}, {1.0, 2.0, 3.0, 4.0});
  Tensor b = tape.leaf({2, 2}, {5.0, 6.0, 7.0, 8.0});
  const std::vector<double>& c = nn::matmul(a, b).values();
  CHECK(c == std::vector<double>{19.0, 22.0, 43.0, 50.0});
  Tensor v = tape.leaf({2}, {1.0, -1.0});
  CHECK(nn::matmul(a, v).values() == std::vector<double>{-1.0, -1.0});
}

TEST_CASE("shape mismatches are rejected") {
  Tape tape;
  Tensor a = tape.leaf({2, 3}, std::vector<double>(6, 1.0));
  Tensor b = tape.leaf({2, 2}, std::vector<double>(4, 1.0));
  CHECK_THROWS_AS(nn::matmul(a, b), NumericError);
  CHECK_THROWS_AS(nn::add(a, b), NumericError);
  Tensor v = tape.leaf({3}, {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(nn::slice(v, 2, 5), NumericError);
}

TEST_CASE("every primitive passes a finite-difference gradient check") {
  Rng rng(42);
  auto vec = [&](std::size_t n) { return LeafSpec{{n}, random_values(n, rng)}; };

  check_gradients({vec(5), vec(5)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::mul(nn::add(in[0], in[1]), nn::sub(in[0], in[1])));
  });
  check_gradients({{{3, 4}, random_values(12, rng)}, vec(4)},
                  [](Tape&, const std::vector<Tensor>& in) {
                    return nn::sum(nn::matmul(in[0], in[1]));
                  });
  check_gradients({{{2, 3}, random_values(6, rng)}, {{3, 2}, random_values(6, rng)}},
                  [](Tape&, const std::vector<Tensor>& in) {
                    return nn::mean(nn::matmul(in[0], in[1]));
                  });
  check_gradients({vec(4), vec(3)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::pick(nn::concat({in[0], in[1]}), 5);
  });
  check_gradients({vec(6)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::slice(in[0], 2, 3));
  });
  check_gradients({vec(5)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::tanh_op(nn::scale(in[0], 1.7)));
  });
  check_gradients({vec(5)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::sigmoid(in[0]));
  });
  check_gradients({vec(5)}, [](Tape&, const std::vector<Tensor>& in) {
    // Keep relu inputs away from the kink.
    return nn::sum(nn::relu(nn::add(in[0], in[0])));
  });
  check_gradients({{{4}, {0.5, 1.5, 2.5, 0.25}}}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::log_op(in[0]));
  });
  check_gradients({vec(6)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::pick(nn::softmax(in[0]), 2);
  });
  check_gradients({vec(6)}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::pick(nn::log_softmax(in[0]), 4);
  });
  check_gradients({{{3, 4}, random_values(12, rng)}}, [](Tape&, const std::vector<Tensor>& in) {
    return nn::sum(nn::row(in[0], 1));
  });
  // A deeper random composition.
  check_gradients({{{4, 4}, random_values(16, rng)}, vec(4), vec(4)},
                  [](Tape&, const std::vector<Tensor>& in) {
                    Tensor h = nn::tanh_op(nn::add(nn::matmul(in[0], in[1]), in[2]));
                    return nn::pick(nn::log_softmax(nn::matmul(in[0], h)), 0);
                  });
}

TEST_CASE("log of a non-positive value is a numeric error") {
  Tape tape;
  Tensor x = tape.leaf({2}, {1.0, -0.5});
  CHECK_THROWS_AS(nn::log_op(x), NumericError);
}

TEST_CASE("backward is idempotent per forward pass") {
  Tape tape;
  Tensor x = tape.leaf({3}, {0.3, -0.2, 0.9});
  Tensor loss = nn::sum(nn::mul(x, x));
  tape.backward(loss);
  const std::vector<double> first = x.grad();
  tape.backward(loss);
  CHECK(x.grad() == first);
  CHECK(first[0] == doctest::Approx(0.6));
}

TEST_CASE("lstm: zero weights and state give exactly zero output") {
  Tape tape;
  nn::LstmWeights w{tape.zeros({8, 3}), tape.zeros({8, 2}), tape.zeros({8})};
  nn::LstmState state{tape.zeros({2}), tape.zeros({2})};
  Tensor input = tape.leaf({3}, {1.0, -2.0, 0.5});
  nn::LstmState next = nn::lstm_step(w, input, state);
  // cell' = sigmoid(0)*0 + sigmoid(0)*tanh(0) = 0; hidden' = sigmoid(0)*tanh(0) = 0.
  for (double v : next.cell.values()) CHECK(v == 0.0);
  for (double v : next.hidden.values()) CHECK(v == 0.0);
}

TEST_CASE("lstm: gradient check on all weight matrices") {
  Rng rng(7);
  const std::size_t x_dim = 3, h_dim = 2;
  check_gradients(
      {{{4 * h_dim, x_dim}, random_values(4 * h_dim * x_dim, rng)},
       {{4 * h_dim, h_dim}, random_values(4 * h_dim * h_dim, rng)},
       {{4 * h_dim}, random_values(4 * h_dim, rng)},
       {{x_dim}, random_values(x_dim, rng)}},
      [&](Tape& tape, const std::vector<Tensor>& in) {
        nn::LstmWeights w{in[0], in[1], in[2]};
        nn::LstmState state{tape.zeros({h_dim}), tape.zeros({h_dim})};
        state = nn::lstm_step(w, in[3], state);
        state = nn::lstm_step(w, in[3], state);  // two steps exercise state grads
        return nn::sum(state.hidden);
      });
}

TEST_CASE("lstm: deterministic state trajectories per seed") {
  auto trajectory = [](std::uint64_t seed) {
    nn::ParamStore store;
    Rng rng(seed);
    nn::add_lstm_params(store, "cell", 3, 4, rng);
    Tape tape;
    nn::TapeBinding binding(tape, store);
    nn::LstmWeights w = nn::bind_lstm(binding, "cell");
    nn::LstmState state{tape.zeros({4}), tape.zeros({4})};
    Tensor input = tape.leaf({3}, {0.1, 0.2, 0.3});
    std::vector<double> out;
    for (int step = 0; step < 5; ++step) {
      state = nn::lstm_step(w, input, state);
      for (double v : state.hidden.values()) out.push_back(v);
    }
    return out;
  };
  CHECK(trajectory(5) == trajectory(5));
  CHECK(trajectory(5) != trajectory(6));
}

TEST_CASE("categorical: +30 margin dominates the draw") {
  Rng rng(3);
  int hits = 0;
  for (int n = 0; n < 1000; ++n) {
    Tape tape;
    Tensor logits = tape.leaf({4}, {0.0, 0.0, 30.0, 0.0});
    if (nn::categorical_sample(logits, rng).index == 2) ++hits;
  }
  CHECK(hits >= 999);
}

TEST_CASE("categorical: uniform 4-way entropy equals log 4") {
  Tape tape;
  Tensor logits = tape.leaf({4}, {1.3, 1.3, 1.3, 1.3});
  nn::CategoricalDraw draw = nn::categorical_forced(logits, 1);
  CHECK(std::abs(draw.entropy.scalar() - std::log(4.0)) <= 1e-9);
  CHECK(std::abs(draw.log_prob.scalar() - std::log(0.25)) <= 1e-9);
}

TEST_CASE("categorical: empirical frequencies match softmax within 3 sigma") {
  const std::vector<double> logits{0.5, -0.3, 1.2, 0.0};
  double z = 0.0;
  std::vector<double> p;
  for (double l : logits) z += std::exp(l);
  for (double l : logits) p.push_back(std::exp(l) / z);

  Rng rng(19);
  const int draws = 100000;
  std::vector<int> counts(4, 0);
  for (int n = 0; n < draws; ++n) {
    Tape tape;
    ++counts[nn::categorical_sample(tape.leaf({4}, logits), rng).index];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double sigma = std::sqrt(draws * p[k] * (1.0 - p[k]));
    CHECK(std::abs(counts[k] - draws * p[k]) <= 3.0 * sigma);
  }
}

TEST_CASE("categorical: score-function gradient matches softmax identity") {
  // d/dlogits of log pi(k) is onehot(k) - p, the REINFORCE building block.
  Tape tape;
  const std::vector<double> raw{0.2, -1.0, 0.7};
  Tensor logits = tape.leaf({3}, raw);
  nn::CategoricalDraw draw = nn::categorical_forced(logits, 1);
  const double advantage = 0.37;
  Tensor loss = nn::scale(draw.log_prob, -advantage);
  tape.backward(loss);
  double z = 0.0;
  for (double l : raw) z += std::exp(l);
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = std::exp(raw[k]) / z;
    const double expected = -advantage * ((k == 1 ? 1.0 : 0.0) - p);
    CHECK(std::abs(logits.grad()[k] - expected) <= 1e-6);
  }
}

TEST_CASE("adam: first step moves by roughly -lr on a unit gradient") {
  nn::ParamStore store;
  Rng rng(1);
  store.add("w", {1}, rng);
  const double start = store.at("w").value[0];
  nn::AdamConfig cfg;
  cfg.learning_rate = 0.01;
  store.adam_step({{"w", {1.0}}}, cfg);
  // Bias correction makes m_hat/sqrt(v_hat) = 1 on the first step.
  CHECK(store.at("w").value[0] == doctest::Approx(start - 0.01).epsilon(1e-6));
  CHECK(store.step() == 1);
}

TEST_CASE("adam: zero gradient leaves the parameter unchanged") {
  nn::ParamStore store;
  Rng rng(2);
  store.add("w", {3}, rng);
  const std::vector<double> before = store.at("w").value;
  store.adam_step({{"w", {0.0, 0.0, 0.0}}}, {});
  CHECK(store.at("w").value == before);
  // Missing grads count as zero as well.
  store.adam_step({}, {});
  CHECK(store.at("w").value == before);
}

TEST_CASE("adam: non-finite gradient aborts the step") {
  nn::ParamStore store;
  Rng rng(3);
  store.add("w", {1}, rng);
  const double before = store.at("w").value[0];
  CHECK_THROWS_AS(store.adam_step({{"w", {std::nan("")}}}, {}), NumericError);
  CHECK(store.at("w").value[0] == before);
}

TEST_CASE("adam: minimizes a quadratic bowl") {
  nn::ParamStore store;
  Rng rng(4);
  store.add("x", {1}, rng, /*range=*/2.0);
  nn::AdamConfig cfg;
  cfg.learning_rate = 0.05;
  for (int step = 0; step < 500; ++step) {
    const double x = store.at("x").value[0];
    store.adam_step({{"x", {2.0 * x}}}, cfg);  // d/dx of x^2
  }
  CHECK(std::abs(store.at("x").value[0]) < 1e-3);
}

TEST_CASE("clip_global_norm scales only oversized gradients") {
  nn::GradMap grads{{"a", {3.0, 0.0}}, {"b", {0.0, 4.0}}};  // norm 5
  CHECK(nn::clip_global_norm(grads, 10.0) == doctest::Approx(5.0));
  CHECK(grads.at("a")[0] == doctest::Approx(3.0));
  CHECK(nn::clip_global_norm(grads, 2.5) == doctest::Approx(5.0));
  CHECK(grads.at("a")[0] == doctest::Approx(1.5));
  CHECK(grads.at("b")[1] == doctest::Approx(2.0));
}

TEST_CASE("param store checkpoint round-trips exactly") {
  nn::ParamStore store;
  Rng rng(11);
  store.add("layer/w", {2, 3}, rng);
  store.add("layer/b", {3}, rng);
  store.adam_step({{"layer/w", {0.1, -0.2, 0.3, 0.0, 0.5, -0.6}}, {"layer/b", {1.0, 2.0, 3.0}}},
                  {});
  const std::string path = "/tmp/dsm_test_params.txt";
  store.save(path);
  nn::ParamStore loaded = nn::ParamStore::load(path);
  CHECK(loaded.step() == store.step());
  for (const auto& [name, entry] : store.entries()) {
    const nn::ParamStore::Entry& other = loaded.at(name);
    CHECK(other.shape == entry.shape);
    CHECK(other.value == entry.value);
    CHECK(other.m == entry.m);
    CHECK(other.v == entry.v);
  }
  std::remove(path.c_str());
}

TEST_CASE("param store rejects duplicate names") {
  nn::ParamStore store;
  Rng rng(1);
  store.add("w", {1}, rng);
  CHECK_THROWS_AS(store.add("w", {1}, rng), ConfigError);
}
