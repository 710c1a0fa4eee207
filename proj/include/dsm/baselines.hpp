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

#ifndef DSM_BASELINES_HPP
#define DSM_BASELINES_HPP

#include "dsm/trainer.hpp"

namespace dsm {

// Comparison arms sharing the oracle/budget contract with the main search.
// Trajectories contain one record per consumed query.

// Uniform samples over the whole space; best-by-val wins.
SearchResult random_search(const TabularBenchmark& bench, std::size_t budget,
                           std::uint64_t seed);

// Recurrent policy over all L positions, absolute reward, same
// Adam/entropy/baseline machinery as the main trainer.
SearchResult reinforce_whole_space(const TabularBenchmark& bench,
                                   const SearchConfig& config);

// Uniform samples from the distance-<=M ball of a fixed center.
SearchResult random_in_subspace(const TabularBenchmark& bench, std::size_t budget,
                                const Architecture& center, std::size_t local_distance,
                                std::uint64_t seed);

// K random centers; each step picks a node uniformly, samples uniformly in
// its ball, and applies the strict-improvement center update.
SearchResult random_with_subspace_update(const TabularBenchmark& bench, std::size_t budget,
                                         std::size_t num_subspaces,
                                         std::size_t local_distance, std::uint64_t seed);

}  // namespace dsm

#endif  // DSM_BASELINES_HPP
