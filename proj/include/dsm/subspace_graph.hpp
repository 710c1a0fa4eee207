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

#ifndef DSM_SUBSPACE_GRAPH_HPP
#define DSM_SUBSPACE_GRAPH_HPP

#include <utility>
#include <vector>

#include "dsm/bench_oracle.hpp"
#include "dsm/search_space.hpp"

namespace dsm {

// One candidate subspace, identified by its center architecture. The local
// radius M lives in the search config; the node only carries the center and
// its cached validation metric.
struct SubspaceNode {
  Architecture center;
  double val_metric = 0.0;
  int id = 0;
};

// Edge density rule. Default: a directed edge for every strictly ordered
// pair (worse -> better). The nearest variant keeps, per node, only the
// edges to its k closest strictly-better nodes by metric gap.
enum class EdgeRule { kCompleteOrder, kNearestBetter };

// Directed graph over the K candidate subspaces; edges point from weak
// centers to strictly better ones, ties produce no edge.
class SubspaceGraph {
 public:
  SubspaceGraph(std::vector<SubspaceNode> nodes, EdgeRule rule = EdgeRule::kCompleteOrder,
                std::size_t nearest_k = 0);

  // Queries the oracle for every center (consuming budget) and builds the
  // full edge set.
  static SubspaceGraph init(const std::vector<Architecture>& centers, Oracle& oracle,
                            EdgeRule rule = EdgeRule::kCompleteOrder,
                            std::size_t nearest_k = 0);

  // Replaces the node's center iff new_val is a strict improvement, then
  // fixes up the edges incident to it. Returns whether anything changed.
  bool update_center(int node_id, const Architecture& new_center, double new_val);

  // Node with maximal val metric; ties broken by lowest id.
  int best_node() const;
  std::pair<Architecture, double> best_center() const;

  std::size_t size() const { return nodes_.size(); }
  const std::vector<SubspaceNode>& nodes() const { return nodes_; }
  const SubspaceNode& node(int id) const { return nodes_.at(id); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Sources of edges (src -> id); the GNN aggregates over these.
  std::vector<int> incoming(int id) const;

  // Recomputes the whole edge set from node metrics. Tests compare this
  // against the incrementally maintained set.
  std::vector<std::pair<int, int>> recompute_edges() const;

 private:
  std::vector<SubspaceNode> nodes_;
  std::vector<std::pair<int, int>> edges_;
  EdgeRule rule_;
  std::size_t nearest_k_;

  void sort_edges();
};

}  // namespace dsm

#endif  // DSM_SUBSPACE_GRAPH_HPP
