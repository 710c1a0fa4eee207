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

#include "dsm/subspace_graph.hpp"

#include <algorithm>

#include "dsm/errors.hpp"

namespace dsm {

SubspaceGraph::SubspaceGraph(std::vector<SubspaceNode> nodes, EdgeRule rule,
                             std::size_t nearest_k)
    : nodes_(std::move(nodes)), rule_(rule), nearest_k_(nearest_k) {
  if (nodes_.empty()) throw ConfigError("subspace graph needs at least one node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].id = static_cast<int>(i);
  edges_ = recompute_edges();
}

SubspaceGraph SubspaceGraph::init(const std::vector<Architecture>& centers, Oracle& oracle,
                                  EdgeRule rule, std::size_t nearest_k) {
  std::vector<SubspaceNode> nodes;
  nodes.reserve(centers.size());
  for (const Architecture& center : centers) {
    SubspaceNode node;
    node.center = center;
    node.val_metric = oracle.query_val(center);
    nodes.push_back(std::move(node));
  }
  return SubspaceGraph(std::move(nodes), rule, nearest_k);
}

std::vector<std::pair<int, int>> SubspaceGraph::recompute_edges() const {
  std::vector<std::pair<int, int>> edges;
  const int k = static_cast<int>(nodes_.size());
  for (int i = 0; i < k; ++i) {
    std::vector<int> better;
    for (int j = 0; j < k; ++j) {
      if (nodes_[i].val_metric < nodes_[j].val_metric) better.push_back(j);
    }
    if (rule_ == EdgeRule::kNearestBetter && nearest_k_ > 0 && better.size() > nearest_k_) {
      std::stable_sort(better.begin(), better.end(), [&](int a, int b) {
        return nodes_[a].val_metric < nodes_[b].val_metric;
      });
      better.resize(nearest_k_);
    }
    for (int j : better) edges.emplace_back(i, j);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

void SubspaceGraph::sort_edges() { std::sort(edges_.begin(), edges_.end()); }

bool SubspaceGraph::update_center(int node_id, const Architecture& new_center,
                                  double new_val) {
  SubspaceNode& node = nodes_.at(node_id);
  if (!(new_val > node.val_metric)) return false;
  node.center = new_center;
  node.val_metric = new_val;

  if (rule_ == EdgeRule::kNearestBetter && nearest_k_ > 0) {
    // Other nodes' nearest sets can shift; K is tiny, rebuild outright.
    edges_ = recompute_edges();
    return true;
  }

  // Complete rule: only edges incident to node_id can change.
  std::erase_if(edges_, [node_id](const std::pair<int, int>& e) {
    return e.first == node_id || e.second == node_id;
  });
  for (int j = 0; j < static_cast<int>(nodes_.size()); ++j) {
    if (j == node_id) continue;
    if (nodes_[node_id].val_metric < nodes_[j].val_metric) {
      edges_.emplace_back(node_id, j);
    } else if (nodes_[j].val_metric < nodes_[node_id].val_metric) {
      edges_.emplace_back(j, node_id);
    }
  }
  sort_edges();
  return true;
}

int SubspaceGraph::best_node() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].val_metric > nodes_[best].val_metric) best = i;
  }
  return best;
}

std::pair<Architecture, double> SubspaceGraph::best_center() const {
  const SubspaceNode& node = nodes_[best_node()];
  return {node.center, node.val_metric};
}

std::vector<int> SubspaceGraph::incoming(int id) const {
  std::vector<int> sources;
  for (const auto& [src, dst] : edges_) {
    if (dst == id) sources.push_back(src);
  }
  return sources;
}

}  // namespace dsm
