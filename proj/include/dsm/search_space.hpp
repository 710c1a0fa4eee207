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

#ifndef DSM_SEARCH_SPACE_HPP
#define DSM_SEARCH_SPACE_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "dsm/rng.hpp"

namespace dsm {

// Architectures are fixed-length strings of component codes; code 0 is the
// conventional placeholder for a non-existent layer and is legal wherever a
// position's candidate set lists it.
struct SearchSpaceSpec {
  // candidates[i] = legal codes at position i; non-empty, distinct codes.
  std::vector<std::vector<int>> candidates;

  std::size_t num_positions() const { return candidates.size(); }

  // Throws ConfigError on empty positions / duplicate codes.
  void validate() const;

  // Index of a code within candidates[pos], or -1.
  int code_index(std::size_t pos, int code) const;

  // Total number of architectures; SizeGuardError if it exceeds limit.
  std::uint64_t space_size(std::uint64_t limit = UINT64_MAX) const;

  // Uniform per-position candidate count; used by desk-scale benchmarks.
  static SearchSpaceSpec uniform(std::size_t num_positions, int num_codes);

  bool operator==(const SearchSpaceSpec&) const = default;
};

struct Architecture {
  std::vector<int> codes;

  auto operator<=>(const Architecture&) const = default;
};

// One local-search step: overwrite codes[position] with code.
struct ModificationStep {
  std::size_t position = 0;
  int code = 0;

  bool operator==(const ModificationStep&) const = default;
};

// Exactly M steps, applied in order; repeats allowed, later steps win.
struct Modification {
  std::vector<ModificationStep> steps;

  bool operator==(const Modification&) const = default;
};

// Comma-joined code text, e.g. "3,0,5,5,1,2".
std::string to_text(const Architecture& arch);
Architecture parse_architecture(const std::string& text);

// Throws EncodingError if arch does not fit spec.
void validate_architecture(const SearchSpaceSpec& spec, const Architecture& arch);

// Number of positions where the codes differ (Hamming distance).
// Throws EncodingError on length mismatch.
std::size_t distance(const Architecture& a, const Architecture& b);

// True iff distance(center, candidate) <= radius.
bool in_subspace(const Architecture& center, const Architecture& candidate,
                 std::size_t radius);

// center with delta's steps applied in order. Validates every step.
Architecture apply_modification(const SearchSpaceSpec& spec,
                                const Architecture& center,
                                const Modification& delta);

// Independent uniform choice per position.
Architecture random_architecture(const SearchSpaceSpec& spec, Rng& rng);

// Exact count of architectures within distance radius of any center.
std::uint64_t ball_size(const SearchSpaceSpec& spec, std::size_t radius);

// All architectures with distance <= radius from center, no duplicates,
// lexicographic order. SizeGuardError if the ball exceeds 10^6.
std::vector<Architecture> enumerate_ball(const SearchSpaceSpec& spec,
                                         const Architecture& center,
                                         std::size_t radius);

// All architectures in the space, lexicographic order. Same 10^6 guard.
std::vector<Architecture> enumerate_space(const SearchSpaceSpec& spec);

// C(L, M) * C^M, the count of M-step modification patterns for a uniform
// space. Distinct from ball_size: patterns include no-ops and repeats.
std::uint64_t modification_space_size(std::size_t num_positions, std::uint64_t codes_per_position,
                                      std::size_t steps);

}  // namespace dsm

#endif  // DSM_SEARCH_SPACE_HPP
