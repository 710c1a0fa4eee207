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

#include "dsm/search_space.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "dsm/errors.hpp"

namespace dsm {

namespace {
constexpr std::uint64_t kEnumerationGuard = 1'000'000;
}

void SearchSpaceSpec::validate() const {
  if (candidates.empty()) {
    throw ConfigError("search space must have at least one position");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].empty()) {
      throw ConfigError("position " + std::to_string(i) + " has no candidate codes");
    }
    std::set<int> seen(candidates[i].begin(), candidates[i].end());
    if (seen.size() != candidates[i].size()) {
      throw ConfigError("position " + std::to_string(i) + " has duplicate codes");
    }
    for (int c : candidates[i]) {
      if (c < 0) {
        throw ConfigError("negative component code at position " + std::to_string(i));
      }
    }
  }
}

int SearchSpaceSpec::code_index(std::size_t pos, int code) const {
  const auto& cand = candidates.at(pos);
  auto it = std::find(cand.begin(), cand.end(), code);
  return it == cand.end() ? -1 : static_cast<int>(it - cand.begin());
}

std::uint64_t SearchSpaceSpec::space_size(std::uint64_t limit) const {
  std::uint64_t total = 1;
  for (const auto& cand : candidates) {
    if (total > limit / cand.size()) {
      throw SizeGuardError("search space larger than guard of " + std::to_string(limit));
    }
    total *= cand.size();
  }
  return total;
}

SearchSpaceSpec SearchSpaceSpec::uniform(std::size_t num_positions, int num_codes) {
  SearchSpaceSpec spec;
  std::vector<int> codes(num_codes);
  for (int c = 0; c < num_codes; ++c) codes[c] = c;
  spec.candidates.assign(num_positions, codes);
  return spec;
}

std::string to_text(const Architecture& arch) {
  std::ostringstream out;
  for (std::size_t i = 0; i < arch.codes.size(); ++i) {
    if (i) out << ',';
    out << arch.codes[i];
  }
  return out.str();
}

Architecture parse_architecture(const std::string& text) {
  Architecture arch;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t consumed = 0;
      const int code = std::stoi(item, &consumed);
      if (consumed != item.size()) throw std::invalid_argument(item);
      arch.codes.push_back(code);
    } catch (const std::exception&) {
      throw EncodingError("bad architecture component '" + item + "' in \"" + text + "\"");
    }
  }
  if (arch.codes.empty()) {
    throw EncodingError("empty architecture text");
  }
  return arch;
}

void validate_architecture(const SearchSpaceSpec& spec, const Architecture& arch) {
  if (arch.codes.size() != spec.num_positions()) {
    throw EncodingError("architecture has " + std::to_string(arch.codes.size()) +
                        " components, space has " + std::to_string(spec.num_positions()));
  }
  for (std::size_t i = 0; i < arch.codes.size(); ++i) {
    if (spec.code_index(i, arch.codes[i]) < 0) {
      throw EncodingError("code " + std::to_string(arch.codes[i]) +
                          " is not a candidate at position " + std::to_string(i));
    }
  }
}

std::size_t distance(const Architecture& a, const Architecture& b) {
  if (a.codes.size() != b.codes.size()) {
    throw EncodingError("distance between architectures of different length");
  }
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.codes.size(); ++i) {
    diff += a.codes[i] != b.codes[i];
  }
  return diff;
}

bool in_subspace(const Architecture& center, const Architecture& candidate,
                 std::size_t radius) {
  return distance(center, candidate) <= radius;
}

Architecture apply_modification(const SearchSpaceSpec& spec,
                                const Architecture& center,
                                const Modification& delta) {
  validate_architecture(spec, center);
  Architecture result = center;
  for (const auto& step : delta.steps) {
    if (step.position >= spec.num_positions()) {
      throw ModificationError("modification position " + std::to_string(step.position) +
                              " out of range");
    }
    if (spec.code_index(step.position, step.code) < 0) {
      throw ModificationError("code " + std::to_string(step.code) +
                              " illegal at position " + std::to_string(step.position));
    }
    result.codes[step.position] = step.code;
  }
  return result;
}

Architecture random_architecture(const SearchSpaceSpec& spec, Rng& rng) {
  Architecture arch;
  arch.codes.reserve(spec.num_positions());
  for (const auto& cand : spec.candidates) {
    arch.codes.push_back(cand[rng.uniform_index(cand.size())]);
  }
  return arch;
}

std::uint64_t ball_size(const SearchSpaceSpec& spec, std::size_t radius) {
  // Coefficient k of prod_i (1 + (|cand_i|-1) x) counts architectures at
  // exactly distance k; sum the first radius+1 of them.
  const std::size_t length = spec.num_positions();
  std::vector<long double> coeff(length + 1, 0.0L);
  coeff[0] = 1.0L;
  for (const auto& cand : spec.candidates) {
    const long double alt = static_cast<long double>(cand.size() - 1);
    for (std::size_t k = length; k >= 1; --k) {
      coeff[k] += coeff[k - 1] * alt;
    }
  }
  long double total = 0.0L;
  for (std::size_t k = 0; k <= std::min(radius, length); ++k) total += coeff[k];
  if (total > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
    throw SizeGuardError("ball size overflows 64 bits");
  }
  return static_cast<std::uint64_t>(total + 0.5L);
}

namespace {

void enumerate_ball_rec(const SearchSpaceSpec& spec, const Architecture& center,
                        std::size_t radius, std::size_t pos, std::size_t diffs,
                        Architecture& current, std::vector<Architecture>& out) {
  if (pos == spec.num_positions()) {
    out.push_back(current);
    return;
  }
  for (int code : spec.candidates[pos]) {
    const std::size_t next_diffs = diffs + (code != center.codes[pos]);
    if (next_diffs > radius) continue;
    current.codes[pos] = code;
    enumerate_ball_rec(spec, center, radius, pos + 1, next_diffs, current, out);
  }
}

}  // namespace

std::vector<Architecture> enumerate_ball(const SearchSpaceSpec& spec,
                                         const Architecture& center,
                                         std::size_t radius) {
  validate_architecture(spec, center);
  const std::uint64_t predicted = ball_size(spec, radius);
  if (predicted > kEnumerationGuard) {
    throw SizeGuardError("ball of " + std::to_string(predicted) +
                         " architectures exceeds enumeration guard");
  }
  std::vector<Architecture> out;
  out.reserve(predicted);
  Architecture current = center;
  enumerate_ball_rec(spec, center, radius, 0, 0, current, out);
  return out;
}

std::vector<Architecture> enumerate_space(const SearchSpaceSpec& spec) {
  const std::uint64_t total = spec.space_size(kEnumerationGuard);
  std::vector<Architecture> out;
  out.reserve(total);
  Architecture current;
  current.codes.assign(spec.num_positions(), 0);
  // Odometer over candidate indices, most significant position first.
  std::vector<std::size_t> idx(spec.num_positions(), 0);
  while (true) {
    for (std::size_t i = 0; i < spec.num_positions(); ++i) {
      current.codes[i] = spec.candidates[i][idx[i]];
    }
    out.push_back(current);
    std::size_t pos = spec.num_positions();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < spec.candidates[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::uint64_t modification_space_size(std::size_t num_positions, std::uint64_t codes_per_position,
                                      std::size_t steps) {
  if (steps > num_positions) {
    throw ConfigError("modification count exceeds number of positions");
  }
  // C(L, M), multiplicative form with overflow checks.
  std::uint64_t binom = 1;
  for (std::size_t i = 1; i <= steps; ++i) {
    const std::uint64_t numer = num_positions - steps + i;
    if (binom > std::numeric_limits<std::uint64_t>::max() / numer) {
      throw SizeGuardError("modification space size overflows 64 bits");
    }
    binom = binom * numer / i;
  }
  std::uint64_t result = binom;
  for (std::size_t i = 0; i < steps; ++i) {
    if (result > std::numeric_limits<std::uint64_t>::max() / codes_per_position) {
      throw SizeGuardError("modification space size overflows 64 bits");
    }
    result *= codes_per_position;
  }
  return result;
}

}  // namespace dsm
