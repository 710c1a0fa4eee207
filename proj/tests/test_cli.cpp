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

// End-to-end checks of the installed binary via std::system. DSM_CLI_BIN is
// injected by the build.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "dsm/bench_oracle.hpp"
#include "dsm/run_io.hpp"
#include "dsm/stats.hpp"

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DSM_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Shared scratch area with a small benchmark every test can reuse.
struct CliFixture {
  fs::path root;
  fs::path bench;

  CliFixture() {
    root = fs::path("/tmp") / ("dsm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(root);
    bench = root / "bench.txt";
    if (!fs::exists(bench)) {
      write_file(root / "bench.cfg", "L = 4\ncodes = 0|1|2\nnoise = 0.02\nseed = 3\n");
      REQUIRE(run_cli("gen-bench --config " + (root / "bench.cfg").string() + " --out " +
                      bench.string()) == 0);
    }
  }
};

}  // namespace

TEST_CASE("gen-bench is deterministic and produces a valid benchmark") {
  CliFixture fx;
  const fs::path again = fx.root / "bench_again.txt";
  REQUIRE(run_cli("gen-bench --config " + (fx.root / "bench.cfg").string() + " --out " +
                  again.string()) == 0);
  CHECK(slurp(fx.bench) == slurp(again));

  const dsm::TabularBenchmark bench = dsm::load_benchmark(fx.bench.string());
  CHECK(bench.entries.size() == 81);  // 3^4
  CHECK_NOTHROW(bench.validate(/*require_exhaustive=*/true));
}

TEST_CASE("gen-bench rejects invalid configs with exit code 2") {
  CliFixture fx;
  write_file(fx.root / "bad.cfg", "lambda = -1\n");
  CHECK(run_cli("gen-bench --config " + (fx.root / "bad.cfg").string() + " --out " +
                (fx.root / "bad.txt").string()) == 2);
  CHECK(run_cli("gen-bench --config " + (fx.root / "nonexistent.cfg").string() + " --out " +
                (fx.root / "bad.txt").string()) == 2);
}

TEST_CASE("gen-bench reports oversized spaces as invariant violations (exit 4)") {
  CliFixture fx;
  write_file(fx.root / "huge.cfg", "L = 10\ncodes = 0|1|2|3|4|5|6|7|8\n");
  CHECK(run_cli("gen-bench --config " + (fx.root / "huge.cfg").string() + " --out " +
                (fx.root / "huge.txt").string()) == 4);
}

TEST_CASE("search runs are byte-identical under identical flags") {
  CliFixture fx;
  const std::string flags = "search --bench " + fx.bench.string() +
                            " --algo dsm --seed 7 --budget 40 --k 3 --m 2 --log-graph --out ";
  REQUIRE(run_cli(flags + (fx.root / "run_a").string()) == 0);
  REQUIRE(run_cli(flags + (fx.root / "run_b").string()) == 0);
  for (const char* name : {"trajectory.jsonl", "summary.json", "graph.jsonl"}) {
    CHECK(slurp(fx.root / "run_a" / name) == slurp(fx.root / "run_b" / name));
  }
  // A different seed must change the trajectory.
  REQUIRE(run_cli("search --bench " + fx.bench.string() +
                  " --algo dsm --seed 8 --budget 40 --k 3 --m 2 --log-graph --out " +
                  (fx.root / "run_c").string()) == 0);
  CHECK(slurp(fx.root / "run_a" / "trajectory.jsonl") !=
        slurp(fx.root / "run_c" / "trajectory.jsonl"));
}

TEST_CASE("search flag and input validation exit codes") {
  CliFixture fx;
  // --m 0 violates M >= 1 at parse time.
  CHECK(run_cli("search --bench " + fx.bench.string() + " --m 0 --out " +
                (fx.root / "x").string()) == 2);
  // Unknown algorithm.
  CHECK(run_cli("search --bench " + fx.bench.string() + " --algo evolution --out " +
                (fx.root / "x").string()) == 2);
  // Missing benchmark file.
  CHECK(run_cli("search --bench " + (fx.root / "missing.txt").string() + " --out " +
                (fx.root / "x").string()) == 3);
  // Budget below K.
  CHECK(run_cli("search --bench " + fx.bench.string() + " --algo dsm --k 4 --budget 2 --out " +
                (fx.root / "x").string()) == 2);
}

TEST_CASE("warm-started search never loses its best seed architecture") {
  CliFixture fx;
  const dsm::TabularBenchmark bench = dsm::load_benchmark(fx.bench.string());
  const dsm::Architecture& best = bench.best_by_val();
  write_file(fx.root / "warm.txt", dsm::to_text(best) + "\n");
  REQUIRE(run_cli("search --bench " + fx.bench.string() +
                  " --algo dsm-plus --warm-start " + (fx.root / "warm.txt").string() +
                  " --seed 5 --budget 30 --k 3 --m 2 --out " +
                  (fx.root / "run_plus").string()) == 0);
  const dsm::RunSummary summary =
      dsm::read_summary((fx.root / "run_plus" / "summary.json").string());
  CHECK(summary.algo == "dsm-plus");
  CHECK(summary.final_val >= bench.at(best).val_metric);
  // dsm-plus without a warm-start file is a config error.
  CHECK(run_cli("search --bench " + fx.bench.string() + " --algo dsm-plus --out " +
                (fx.root / "x").string()) == 2);
}

TEST_CASE("sweep writes one run per cell and a correct aggregate CSV") {
  CliFixture fx;
  const fs::path out = fx.root / "sweep";
  REQUIRE(run_cli("sweep --bench " + fx.bench.string() +
                  " --algo dsm --seeds 2 --k-list 3 --m-list 1,2 --budget 30 --jobs 2 --out " +
                  out.string()) == 0);
  // 2 seeds x 1 K x 2 M = 4 run dirs.
  int run_dirs = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.is_directory()) {
      ++run_dirs;
      CHECK(fs::exists(entry.path() / "summary.json"));
    }
  }
  CHECK(run_dirs == 4);

  std::ifstream csv(out / "sweep.csv");
  std::string header, line;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "k,m,runs,mean_val,std_val,mean_test,std_test");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    // Recompute the row's mean from the per-run summaries it aggregates.
    std::istringstream fields(line);
    std::string k, m, runs, mean_val;
    std::getline(fields, k, ',');
    std::getline(fields, m, ',');
    std::getline(fields, runs, ',');
    std::getline(fields, mean_val, ',');
    CHECK(runs == "2");
    std::vector<double> vals;
    for (int seed = 0; seed < 2; ++seed) {
      const fs::path dir = out / ("k" + k + "_m" + m + "_s" + std::to_string(seed));
      vals.push_back(dsm::read_summary((dir / "summary.json").string()).final_val);
    }
    CHECK(std::abs(std::stod(mean_val) - dsm::mean(vals)) <= 1e-6);
  }
  CHECK(rows == 2);

  // Empty axis is rejected.
  CHECK(run_cli("sweep --bench " + fx.bench.string() + " --k-list 3 --out " +
                (fx.root / "sweep2").string()) == 2);
}

TEST_CASE("report aggregates run directories into tables and curves") {
  CliFixture fx;
  for (int seed = 0; seed < 3; ++seed) {
    REQUIRE(run_cli("search --bench " + fx.bench.string() + " --algo random --seed " +
                    std::to_string(seed) + " --budget 25 --out " +
                    (fx.root / ("rpt_run" + std::to_string(seed))).string()) == 0);
  }
  const fs::path out = fx.root / "report";
  REQUIRE(run_cli("report --runs " + (fx.root / "rpt_run0").string() + " " +
                  (fx.root / "rpt_run1").string() + " " + (fx.root / "rpt_run2").string() +
                  " --bench " + fx.bench.string() + " --locality-pairs 2000 --out " +
                  out.string()) == 0);

  // Table: one variant row whose mean matches the summaries.
  std::ifstream table(out / "summary_table.csv");
  std::string header, row;
  REQUIRE(std::getline(table, header));
  REQUIRE(std::getline(table, row));
  CHECK(row.substr(0, 9) == "random,3,");
  std::vector<double> vals;
  for (int seed = 0; seed < 3; ++seed) {
    vals.push_back(dsm::read_summary(
                       (fx.root / ("rpt_run" + std::to_string(seed)) / "summary.json").string())
                       .final_val);
  }
  std::istringstream fields(row.substr(9));
  std::string mean_val;
  std::getline(fields, mean_val, ',');
  CHECK(std::abs(std::stod(mean_val) - dsm::mean(vals)) <= 1e-6);

  // Curves: one row per trajectory record across the three runs.
  std::ifstream curves(out / "curves.csv");
  REQUIRE(std::getline(curves, header));
  int curve_rows = 0;
  while (std::getline(curves, row)) {
    if (!row.empty()) ++curve_rows;
  }
  CHECK(curve_rows == 3 * 25);

  // Locality CSV exists with the expected header.
  std::ifstream locality(out / "locality.csv");
  REQUIRE(std::getline(locality, header));
  CHECK(header == "distance,pairs,mean_abs_diff,std_abs_diff");

  // Unknown run directory is a data error.
  CHECK(run_cli("report --runs " + (fx.root / "no_such_dir").string() + " --out " +
                (fx.root / "report2").string()) == 3);
}
