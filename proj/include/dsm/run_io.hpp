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

#ifndef DSM_RUN_IO_HPP
#define DSM_RUN_IO_HPP

#include <map>
#include <string>

#include "dsm/trainer.hpp"

namespace dsm {

// Extra key/value context recorded in the summary (seed, flags, variant).
using RunMeta = std::map<std::string, std::string>;

// One JSON object per iteration:
//   {"iteration":..,"subspace":..,"center":..,"beta":..,"beta_val":..,
//    "reward":..,"updated":..,"budget_used":..,"best_val":..}
void write_trajectory(const std::string& path, const SearchResult& result);

// Single JSON object with final metrics, query count, distinct-center
// count, and the meta map under "meta".
void write_summary(const std::string& path, const SearchResult& result,
                   const RunMeta& meta);

// Writes trajectory.jsonl, summary.json, and optionally graph.jsonl into
// dir (created if missing).
void write_run_dir(const std::string& dir, const SearchResult& result,
                   const RunMeta& meta);

struct RunSummary {
  std::string algo;
  std::string final_arch;
  double final_val = 0.0;
  double final_test = 0.0;
  std::size_t queries_used = 0;
  std::size_t distinct_centers = 0;
  RunMeta meta;
};

RunSummary read_summary(const std::string& path);

}  // namespace dsm

#endif  // DSM_RUN_IO_HPP
