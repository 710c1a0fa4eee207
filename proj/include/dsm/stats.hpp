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

#ifndef DSM_STATS_HPP
#define DSM_STATS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "dsm/errors.hpp"

namespace dsm {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / xs.size();
}

// Sample standard deviation (n - 1 denominator).
inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - mu) * (x - mu);
  return std::sqrt(sq / (xs.size() - 1));
}

// One-sided critical value of Student's t at the 5% level.
inline double t_critical_05(std::size_t dof) {
  static constexpr std::pair<std::size_t, double> kTable[] = {
      {1, 6.3138}, {2, 2.9200}, {3, 2.3534}, {4, 2.1318}, {5, 2.0150},
      {6, 1.9432}, {7, 1.8946}, {8, 1.8595}, {9, 1.8331}, {10, 1.8125},
      {12, 1.7823}, {15, 1.7531}, {20, 1.7247}, {25, 1.7081}, {29, 1.6991},
      {30, 1.6973}, {40, 1.6839}, {60, 1.6706}, {120, 1.6577}};
  double value = 1.6449;  // normal limit
  for (const auto& [df, crit] : kTable) {
    if (dof <= df) return crit;
    value = crit;
  }
  return value;
}

// t statistic for paired samples, testing mean(a - b) > 0.
inline double paired_t_statistic(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ConfigError("paired t-test needs two equal samples of size >= 2");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double sd = sample_std(diff);
  if (sd == 0.0) return mean(diff) > 0.0 ? INFINITY : (mean(diff) < 0.0 ? -INFINITY : 0.0);
  return mean(diff) / (sd / std::sqrt(static_cast<double>(diff.size())));
}

// True iff mean(a) > mean(b) with one-sided paired significance at 5%.
inline bool paired_greater_05(const std::vector<double>& a, const std::vector<double>& b) {
  return paired_t_statistic(a, b) > t_critical_05(a.size() - 1);
}

}  // namespace dsm

#endif  // DSM_STATS_HPP
