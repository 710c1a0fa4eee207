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

#include <algorithm>
#include <vector>

#include <doctest.h>

#include "dsm/errors.hpp"
#include "dsm/subspace_graph.hpp"

namespace {

using namespace dsm;

std::vector<SubspaceNode> make_nodes(const std::vector<double>& metrics) {
  std::vector<SubspaceNode> nodes;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    nodes.push_back({Architecture{{static_cast<int>(i)}}, metrics[i], static_cast<int>(i)});
  }
  return nodes;
}

// Brute-force edge oracle: one edge per strictly ordered pair.
std::vector<std::pair<int, int>> brute_force_edges(const std::vector<double>& metrics) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      if (metrics[i] < metrics[j]) edges.emplace_back(i, j);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

TEST_CASE("single-node graph has no edges") {
  SubspaceGraph graph(make_nodes({0.5}));
  CHECK(graph.size() == 1);
  CHECK(graph.edges().empty());
  CHECK(graph.best_node() == 0);
}

TEST_CASE("three distinct metrics produce all three ordered edges") {
  SubspaceGraph graph(make_nodes({0.2, 0.8, 0.5}));
  CHECK(graph.edges() == brute_force_edges({0.2, 0.8, 0.5}));
  CHECK(graph.edges().size() == 3);
}

TEST_CASE("tied metrics produce no edge between the tied pair") {
  const std::vector<double> metrics{0.4, 0.4, 0.9, 0.1};
  SubspaceGraph graph(make_nodes(metrics));
  CHECK(graph.edges() == brute_force_edges(metrics));
  // 0 and 1 tie: pairs (0,2),(1,2),(3,2),(3,0),(3,1) remain.
  CHECK(graph.edges().size() == 5);
}

TEST_CASE("init queries the oracle once per center") {
  TabularBenchmark bench;
  bench.spec.candidates = {{0, 1, 2}};
  bench.name = "t";
  bench.entries[Architecture{{0}}] = {0.3, 0.3};
  bench.entries[Architecture{{1}}] = {0.7, 0.7};
  bench.entries[Architecture{{2}}] = {0.5, 0.5};
  Oracle oracle(bench, 10);
  const std::vector<Architecture> centers{Architecture{{0}}, Architecture{{1}}, Architecture{{2}}};
  SubspaceGraph graph = SubspaceGraph::init(centers, oracle);
  CHECK(oracle.budget().used == 3);
  CHECK(graph.node(1).val_metric == doctest::Approx(0.7));
  CHECK(graph.best_node() == 1);

  Oracle small(bench, 2);
  CHECK_THROWS_AS(SubspaceGraph::init(centers, small), BudgetError);
}

TEST_CASE("update_center requires a strict improvement") {
  SubspaceGraph graph(make_nodes({0.4, 0.6}));
  // Equal value: rejected, graph untouched.
  CHECK_FALSE(graph.update_center(0, Architecture{{9}}, 0.4));
  CHECK(graph.node(0).center == Architecture{{0}});
  // Lower value: rejected too.
  CHECK_FALSE(graph.update_center(0, Architecture{{9}}, 0.1));
  // Strict improvement: accepted, edges fixed up.
  CHECK(graph.update_center(0, Architecture{{9}}, 0.41));
  CHECK(graph.node(0).center == Architecture{{9}});
  CHECK(graph.node(0).val_metric == doctest::Approx(0.41));
  CHECK(graph.edges() == graph.recompute_edges());
}

TEST_CASE("a maximal node becomes a sink") {
  SubspaceGraph graph(make_nodes({0.3, 0.6, 0.5}));
  CHECK(graph.update_center(2, Architecture{{7}}, 1.0));
  for (const auto& [src, dst] : graph.edges()) CHECK(src != 2);
  CHECK(graph.incoming(2).size() == 2);
  CHECK(graph.best_node() == 2);
}

TEST_CASE("incremental edge maintenance matches a full recompute") {
  SubspaceGraph graph(make_nodes({0.10, 0.20, 0.30, 0.40, 0.25}));
  Rng rng(31);
  std::vector<double> previous;
  for (const auto& node : graph.nodes()) previous.push_back(node.val_metric);
  for (int step = 0; step < 300; ++step) {
    const int id = static_cast<int>(rng.uniform_index(graph.size()));
    const double proposal = rng.uniform(0.0, 1.0);
    const double before = graph.node(id).val_metric;
    const bool changed =
        graph.update_center(id, Architecture{{step}}, proposal);
    CHECK(changed == (proposal > before));
    CHECK(graph.edges() == graph.recompute_edges());
    // Node metrics only ever increase.
    for (std::size_t i = 0; i < graph.size(); ++i) {
      CHECK(graph.node(i).val_metric >= previous[i]);
      previous[i] = graph.node(i).val_metric;
    }
  }
}

TEST_CASE("best_center tie-breaks by lowest node id") {
  SubspaceGraph a(make_nodes({0.3, 0.9, 0.5}));
  CHECK(a.best_node() == 1);
  CHECK(a.best_center().second == doctest::Approx(0.9));
  SubspaceGraph tie(make_nodes({0.7, 0.7}));
  CHECK(tie.best_node() == 0);
  CHECK(tie.best_center().first == Architecture{{0}});
}

TEST_CASE("best_center is invariant under monotone metric transforms") {
  const std::vector<double> metrics{0.12, 0.48, 0.93, 0.40};
  SubspaceGraph graph(make_nodes(metrics));
  std::vector<double> squashed;
  for (double m : metrics) squashed.push_back(m * m * 0.5 + 0.1);  // strictly increasing
  SubspaceGraph transformed(make_nodes(squashed));
  CHECK(graph.best_node() == transformed.best_node());
  CHECK(graph.edges() == transformed.edges());
}

TEST_CASE("nearest-better rule keeps at most k outgoing edges per node") {
  const std::vector<double> metrics{0.1, 0.2, 0.3, 0.4, 0.5};
  SubspaceGraph graph(make_nodes(metrics), EdgeRule::kNearestBetter, 1);
  CHECK(graph.edges() == graph.recompute_edges());
  const auto complete = brute_force_edges(metrics);
  std::vector<std::size_t> outgoing(metrics.size(), 0);
  for (const auto& [src, dst] : graph.edges()) {
    ++outgoing[src];
    // Still a subset of the complete weak->better relation.
    CHECK(std::find(complete.begin(), complete.end(), std::make_pair(src, dst)) !=
          complete.end());
  }
  for (std::size_t i = 0; i + 1 < metrics.size(); ++i) CHECK(outgoing[i] == 1);
  // Nearest by metric gap: node 0 (0.1) links to node 1 (0.2).
  CHECK(std::find(graph.edges().begin(), graph.edges().end(), std::make_pair(0, 1)) !=
        graph.edges().end());

  // Updates keep the rule satisfied.
  SubspaceGraph updated(make_nodes(metrics), EdgeRule::kNearestBetter, 2);
  updated.update_center(0, Architecture{{9}}, 0.45);
  CHECK(updated.edges() == updated.recompute_edges());
}
