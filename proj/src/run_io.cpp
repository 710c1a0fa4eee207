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

#include "dsm/run_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dsm/errors.hpp"

namespace dsm {

using nlohmann::json;

void write_trajectory(const std::string& path, const SearchResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write trajectory " + path);
  for (const IterationRecord& rec : result.trajectory) {
    json record{{"iteration", rec.iteration},
                {"subspace", rec.subspace},
                {"center", rec.center.codes.empty() ? "" : to_text(rec.center)},
                {"beta", to_text(rec.candidate)},
                {"beta_val", rec.candidate_val},
                {"reward", rec.reward},
                {"updated", rec.updated},
                {"budget_used", rec.budget_used},
                {"best_val", rec.best_val}};
    out << record.dump() << "\n";
  }
  if (!out) throw DataError("write failure on " + path);
}

void write_summary(const std::string& path, const SearchResult& result,
                   const RunMeta& meta) {
  json summary{{"algo", result.algo},
               {"final_arch", to_text(result.final_arch)},
               {"final_val", result.final_val},
               {"final_test", result.final_test},
               {"queries_used", result.queries_used},
               {"distinct_centers", result.distinct_centers},
               {"iterations", result.trajectory.size()},
               {"meta", meta}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write summary " + path);
  out << summary.dump(2) << "\n";
  if (!out) throw DataError("write failure on " + path);
}

void write_run_dir(const std::string& dir, const SearchResult& result,
                   const RunMeta& meta) {
  std::filesystem::create_directories(dir);
  write_trajectory(dir + "/trajectory.jsonl", result);
  write_summary(dir + "/summary.json", result, meta);
  if (!result.graph_log.empty()) {
    std::ofstream out(dir + "/graph.jsonl", std::ios::binary);
    if (!out) throw DataError("cannot write graph log in " + dir);
    for (const std::string& line : result.graph_log) out << line << "\n";
  }
}

RunSummary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open summary " + path);
  json summary;
  try {
    in >> summary;
  } catch (const json::exception& e) {
    throw DataError("bad summary " + path + ": " + e.what());
  }
  RunSummary out;
  try {
    out.algo = summary.at("algo").get<std::string>();
    out.final_arch = summary.at("final_arch").get<std::string>();
    out.final_val = summary.at("final_val").get<double>();
    out.final_test = summary.at("final_test").get<double>();
    out.queries_used = summary.at("queries_used").get<std::size_t>();
    out.distinct_centers = summary.at("distinct_centers").get<std::size_t>();
    if (summary.contains("meta")) {
      out.meta = summary.at("meta").get<RunMeta>();
    }
  } catch (const json::exception& e) {
    throw DataError("bad summary " + path + ": " + e.what());
  }
  return out;
}

}  // namespace dsm
