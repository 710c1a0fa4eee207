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

// Reproducible experiment runner: benchmark generation, single search
// runs, multi-seed sweeps, and CSV report emission.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsm/baselines.hpp"
#include "dsm/bench_oracle.hpp"
#include "dsm/errors.hpp"
#include "dsm/run_io.hpp"
#include "dsm/stats.hpp"
#include "dsm/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitBudget = 4;

std::string resolve_out(const std::string& path) {
  const char* root = std::getenv("DSM_OUT_ROOT");
  if (root && *root && fs::path(path).is_relative()) {
    return (fs::path(root) / path).string();
  }
  return path;
}

// ---- gen-bench ----

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dsm::ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw dsm::ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<int> parse_codes(const std::string& text) {
  std::vector<int> codes;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, '|')) {
    try {
      codes.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw dsm::ConfigError("bad code '" + item + "'");
    }
  }
  if (codes.empty()) throw dsm::ConfigError("empty code list");
  return codes;
}

dsm::SyntheticBenchSpec spec_from_config(const std::map<std::string, std::string>& kv) {
  dsm::SyntheticBenchSpec spec = dsm::default_synthetic_spec();
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    std::size_t length = spec.space.num_positions();
    if (const auto* v = get("L")) length = std::stoul(*v);
    if (const auto* v = get("codes")) {
      spec.space.candidates.assign(length, parse_codes(*v));
    } else if (length != spec.space.num_positions()) {
      throw dsm::ConfigError("L given without codes");
    }
    for (std::size_t i = 0; i < length; ++i) {
      if (const auto* v = get("codes" + std::to_string(i))) {
        spec.space.candidates.at(i) = parse_codes(*v);
      }
    }
    if (const auto* v = get("utility_scale")) spec.utility_scale = std::stod(*v);
    if (const auto* v = get("lambda")) spec.interaction_strength = std::stod(*v);
    if (const auto* v = get("noise")) spec.noise_std = std::stod(*v);
    if (const auto* v = get("seed")) spec.seed = std::stoull(*v);
    if (const auto* v = get("name")) spec.name = *v;
    if (const auto* v = get("pairs")) {
      spec.interaction_pairs.clear();
      std::istringstream pairs(*v);
      std::string item;
      while (std::getline(pairs, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw dsm::ConfigError("bad pair '" + item + "'");
        spec.interaction_pairs.emplace_back(std::stoul(item.substr(0, dash)),
                                            std::stoul(item.substr(dash + 1)));
      }
    } else if (get("L")) {
      spec.interaction_pairs.clear();
      for (std::size_t i = 0; i + 1 < length; ++i) spec.interaction_pairs.emplace_back(i, i + 1);
    }
  } catch (const std::invalid_argument&) {
    throw dsm::ConfigError("malformed numeric value in config");
  } catch (const std::out_of_range&) {
    throw dsm::ConfigError("numeric value out of range in config");
  }
  spec.validate();
  return spec;
}

// ---- search ----

struct SearchArgs {
  std::string bench_path;
  std::string algo = "dsm";
  std::uint64_t seed = 0;
  std::size_t budget = 1000;
  std::size_t k = 4;
  std::size_t m = 4;
  double learning_rate = 1e-2;
  double entropy_weight = 7.5e-4;
  bool no_subspace_update = false;
  std::string reward = "improvement";
  bool no_gnn = false;
  std::string warm_start_path;
  std::string center_text;
  std::size_t edge_nearest = 0;
  bool log_graph = false;
  std::string out_dir = "runs/run";
};

std::vector<dsm::Architecture> load_warm_start(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dsm::DataError("cannot open warm-start file " + path);
  std::vector<dsm::Architecture> archs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    archs.push_back(dsm::parse_architecture(line));
  }
  if (archs.empty()) throw dsm::DataError("warm-start file " + path + " has no architectures");
  return archs;
}

std::string variant_name(const SearchArgs& args) {
  std::string name = args.algo;
  if (args.algo == "dsm" || args.algo == "dsm-plus") {
    if (args.no_subspace_update) name += "-no-update";
    if (args.reward == "absolute") name += "-absolute";
    if (args.no_gnn) name += "-pointwise";
  }
  return name;
}

dsm::SearchResult run_one(const dsm::TabularBenchmark& bench, const SearchArgs& args) {
  if (args.algo == "dsm" || args.algo == "dsm-plus") {
    dsm::SearchConfig config;
    config.num_subspaces = args.k;
    config.local_distance = args.m;
    config.budget = args.budget;
    config.learning_rate = args.learning_rate;
    config.entropy_weight = args.entropy_weight;
    config.seed = args.seed;
    config.subspace_update = !args.no_subspace_update;
    config.reward_mode = args.reward == "absolute" ? dsm::RewardMode::kAbsolute
                                                   : dsm::RewardMode::kImprovement;
    config.use_graph = !args.no_gnn;
    config.log_graph = args.log_graph;
    if (args.edge_nearest > 0) {
      config.edge_rule = dsm::EdgeRule::kNearestBetter;
      config.edge_nearest_k = args.edge_nearest;
    }
    if (args.algo == "dsm-plus") {
      if (args.warm_start_path.empty()) {
        throw dsm::ConfigError("dsm-plus requires --warm-start");
      }
      config.warm_start = load_warm_start(args.warm_start_path);
    }
    return dsm::run_search(bench, config);
  }
  if (args.algo == "random") {
    return dsm::random_search(bench, args.budget, args.seed);
  }
  if (args.algo == "reinforce") {
    dsm::SearchConfig config;
    config.budget = args.budget;
    config.learning_rate = args.learning_rate;
    config.entropy_weight = args.entropy_weight;
    config.seed = args.seed;
    return dsm::reinforce_whole_space(bench, config);
  }
  if (args.algo == "random-sub") {
    dsm::Architecture center;
    if (!args.center_text.empty()) {
      center = dsm::parse_architecture(args.center_text);
      dsm::validate_architecture(bench.spec, center);
    } else {
      dsm::Rng rng(args.seed ^ 0x5eed5eed5eed5eedULL);
      center = dsm::random_architecture(bench.spec, rng);
    }
    return dsm::random_in_subspace(bench, args.budget, center, args.m, args.seed);
  }
  if (args.algo == "random-update") {
    return dsm::random_with_subspace_update(bench, args.budget, args.k, args.m, args.seed);
  }
  throw dsm::ConfigError("unknown algorithm '" + args.algo + "'");
}

dsm::RunMeta meta_for(const SearchArgs& args) {
  return {{"algo", args.algo},
          {"variant", variant_name(args)},
          {"seed", std::to_string(args.seed)},
          {"budget", std::to_string(args.budget)},
          {"k", std::to_string(args.k)},
          {"m", std::to_string(args.m)},
          {"reward", args.reward},
          {"subspace_update", args.no_subspace_update ? "off" : "on"},
          {"graph", args.no_gnn ? "pointwise" : "gnn"}};
}

// ---- report helpers ----

struct GroupStats {
  std::vector<double> vals, tests, centers;
};

void write_csv_header(std::ofstream& out, const std::string& header) { out << header << "\n"; }

// ---- subcommand bodies ----

int cmd_gen_bench(const std::string& config_path, const std::string& out_path) {
  const auto spec = spec_from_config(parse_config_file(config_path));
  const dsm::TabularBenchmark bench = dsm::generate_synthetic(spec);
  dsm::save_benchmark(bench, resolve_out(out_path));
  std::cout << "wrote " << bench.entries.size() << " entries to " << resolve_out(out_path)
            << "\n";
  return kExitOk;
}

int cmd_search(const SearchArgs& args) {
  const dsm::TabularBenchmark bench = dsm::load_benchmark(args.bench_path);
  const dsm::SearchResult result = run_one(bench, args);
  const std::string out_dir = resolve_out(args.out_dir);
  dsm::write_run_dir(out_dir, result, meta_for(args));
  std::cout << "algo=" << result.algo << " final_val=" << result.final_val
            << " final_test=" << result.final_test << " queries=" << result.queries_used
            << " out=" << out_dir << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string bench_path;
  std::string algo = "dsm";
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> k_list;
  std::vector<std::size_t> m_list;
  std::size_t budget = 1000;
  std::string out_dir = "sweep";
  std::size_t jobs = 1;
};

int cmd_sweep(const SweepArgs& sweep) {
  if (sweep.seeds.empty() || sweep.k_list.empty() || sweep.m_list.empty()) {
    throw dsm::ConfigError("sweep requires non-empty seeds, k-list, and m-list");
  }
  const dsm::TabularBenchmark bench = dsm::load_benchmark(sweep.bench_path);
  const std::string out_root = resolve_out(sweep.out_dir);
  fs::create_directories(out_root);

  struct Cell {
    std::size_t k, m;
    std::uint64_t seed;
    double final_val = 0.0, final_test = 0.0;
  };
  std::vector<Cell> cells;
  for (std::size_t k : sweep.k_list) {
    for (std::size_t m : sweep.m_list) {
      for (std::uint64_t seed : sweep.seeds) cells.push_back({k, m, seed});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      if (failed.load()) return;
      Cell& cell = cells[i];
      try {
        SearchArgs args;
        args.bench_path = sweep.bench_path;
        args.algo = sweep.algo;
        args.seed = cell.seed;
        args.budget = sweep.budget;
        args.k = cell.k;
        args.m = cell.m;
        std::ostringstream dir;
        dir << out_root << "/k" << cell.k << "_m" << cell.m << "_s" << cell.seed;
        args.out_dir = dir.str();
        const dsm::SearchResult result = run_one(bench, args);
        dsm::write_run_dir(dir.str(), result, meta_for(args));
        cell.final_val = result.final_val;
        cell.final_test = result.final_test;
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };
  const std::size_t num_threads = std::max<std::size_t>(1, std::min(sweep.jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < num_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw dsm::Error(first_error);

  std::ofstream csv(out_root + "/sweep.csv", std::ios::binary);
  write_csv_header(csv, "k,m,runs,mean_val,std_val,mean_test,std_test");
  for (std::size_t k : sweep.k_list) {
    for (std::size_t m : sweep.m_list) {
      std::vector<double> vals, tests;
      for (const Cell& cell : cells) {
        if (cell.k == k && cell.m == m) {
          vals.push_back(cell.final_val);
          tests.push_back(cell.final_test);
        }
      }
      char line[256];
      std::snprintf(line, sizeof(line), "%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f", k, m, vals.size(),
                    dsm::mean(vals), dsm::sample_std(vals), dsm::mean(tests),
                    dsm::sample_std(tests));
      csv << line << "\n";
    }
  }
  std::cout << "wrote " << cells.size() << " runs and " << out_root << "/sweep.csv\n";
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> run_dirs;
  std::string out_dir = "report";
  std::string bench_path;
  std::size_t locality_pairs = 10000;
  std::uint64_t locality_seed = 0;
};

int cmd_report(const ReportArgs& report) {
  const std::string out_root = resolve_out(report.out_dir);
  fs::create_directories(out_root);

  // Collect run dirs: accept either run dirs directly or parents of them.
  std::vector<fs::path> runs;
  for (const std::string& dir : report.run_dirs) {
    if (fs::exists(fs::path(dir) / "summary.json")) {
      runs.emplace_back(dir);
      continue;
    }
    if (!fs::is_directory(dir)) throw dsm::DataError("no such run directory " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) {
        runs.push_back(entry.path());
      }
    }
  }
  if (runs.empty()) throw dsm::DataError("no run summaries found");
  std::sort(runs.begin(), runs.end());

  std::map<std::string, GroupStats> groups;
  std::ofstream curves(out_root + "/curves.csv", std::ios::binary);
  write_csv_header(curves, "run,variant,budget_used,best_val");
  for (const fs::path& run : runs) {
    const dsm::RunSummary summary = dsm::read_summary((run / "summary.json").string());
    std::string variant = summary.algo;
    if (auto it = summary.meta.find("variant"); it != summary.meta.end()) variant = it->second;
    GroupStats& group = groups[variant];
    group.vals.push_back(summary.final_val);
    group.tests.push_back(summary.final_test);
    group.centers.push_back(static_cast<double>(summary.distinct_centers));

    std::ifstream traj(run / "trajectory.jsonl");
    std::string line;
    while (std::getline(traj, line)) {
      if (line.empty()) continue;
      const auto record = nlohmann::json::parse(line);
      char row[512];
      std::snprintf(row, sizeof(row), "%s,%s,%zu,%.6f", run.filename().c_str(),
                    variant.c_str(), record.at("budget_used").get<std::size_t>(),
                    record.at("best_val").get<double>());
      curves << row << "\n";
    }
  }

  std::ofstream table(out_root + "/summary_table.csv", std::ios::binary);
  write_csv_header(table,
                   "variant,runs,mean_val,std_val,mean_test,std_test,mean_distinct_centers");
  for (const auto& [variant, group] : groups) {
    char row[512];
    std::snprintf(row, sizeof(row), "%s,%zu,%.6f,%.6f,%.6f,%.6f,%.2f", variant.c_str(),
                  group.vals.size(), dsm::mean(group.vals), dsm::sample_std(group.vals),
                  dsm::mean(group.tests), dsm::sample_std(group.tests),
                  dsm::mean(group.centers));
    table << row << "\n";
  }

  if (!report.bench_path.empty()) {
    const dsm::TabularBenchmark bench = dsm::load_benchmark(report.bench_path);
    dsm::Rng rng(report.locality_seed);
    const auto rows = dsm::locality_report(bench, report.locality_pairs, rng);
    std::ofstream locality(out_root + "/locality.csv", std::ios::binary);
    write_csv_header(locality, "distance,pairs,mean_abs_diff,std_abs_diff");
    for (const auto& row : rows) {
      char line[256];
      std::snprintf(line, sizeof(line), "%zu,%zu,%.6f,%.6f", row.distance, row.pairs,
                    row.mean_abs_diff, row.std_abs_diff);
      locality << line << "\n";
    }
  }
  std::cout << "report for " << runs.size() << " runs in " << out_root << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dominative-subspace mining over tabular NAS benchmarks"};
  app.require_subcommand(1);

  // gen-bench
  std::string gen_config, gen_out;
  CLI::App* gen = app.add_subcommand("gen-bench", "Generate a synthetic benchmark file");
  gen->add_option("--config", gen_config, "Key-value config file")->required();
  gen->add_option("--out", gen_out, "Output benchmark path")->required();

  // search
  SearchArgs search;
  CLI::App* search_cmd = app.add_subcommand("search", "Run one search");
  search_cmd->add_option("--bench", search.bench_path, "Benchmark file")->required();
  search_cmd->add_option("--algo", search.algo,
                         "dsm|dsm-plus|random|reinforce|random-sub|random-update");
  search_cmd->add_option("--seed", search.seed, "Run seed");
  search_cmd->add_option("--budget", search.budget, "Query budget");
  search_cmd->add_option("--k", search.k, "Number of candidate subspaces");
  search_cmd->add_option("--m", search.m, "Local search distance")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
  search_cmd->add_option("--lr", search.learning_rate, "Learning rate");
  search_cmd->add_option("--entropy", search.entropy_weight, "Entropy bonus weight");
  search_cmd->add_flag("--no-subspace-update", search.no_subspace_update,
                       "Freeze subspace centers");
  search_cmd->add_option("--reward", search.reward, "improvement|absolute")
      ->check(CLI::IsMember({"improvement", "absolute"}));
  search_cmd->add_flag("--no-gnn", search.no_gnn, "Pointwise node features");
  search_cmd->add_option("--warm-start", search.warm_start_path,
                         "File of initial center architectures");
  search_cmd->add_option("--center", search.center_text,
                         "Fixed center for random-sub, e.g. 3,0,5,5,1,2");
  search_cmd->add_option("--edge-nearest", search.edge_nearest,
                         "Keep only this many better-neighbor edges per node");
  search_cmd->add_flag("--log-graph", search.log_graph, "Write per-iteration graph.jsonl");
  search_cmd->add_option("--out", search.out_dir, "Output directory");

  // sweep
  SweepArgs sweep;
  std::size_t sweep_num_seeds = 0;
  std::string sweep_seed_list;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Seeds x K x M cross-product");
  sweep_cmd->add_option("--bench", sweep.bench_path, "Benchmark file")->required();
  sweep_cmd->add_option("--algo", sweep.algo, "Algorithm for every cell");
  sweep_cmd->add_option("--seeds", sweep_num_seeds, "Run seeds 0..N-1");
  sweep_cmd->add_option("--seed-list", sweep_seed_list, "Comma-separated seed list");
  sweep_cmd->add_option("--k-list", sweep.k_list, "K values")->delimiter(',');
  sweep_cmd->add_option("--m-list", sweep.m_list, "M values")->delimiter(',');
  sweep_cmd->add_option("--budget", sweep.budget, "Query budget per run");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel cells");
  sweep_cmd->add_option("--out", sweep.out_dir, "Output directory");

  // report
  ReportArgs report;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate run directories into CSVs");
  report_cmd->add_option("--runs", report.run_dirs, "Run dirs or parents of run dirs")
      ->required();
  report_cmd->add_option("--out", report.out_dir, "Output directory");
  report_cmd->add_option("--bench", report.bench_path, "Benchmark for the locality CSV");
  report_cmd->add_option("--locality-pairs", report.locality_pairs,
                         "Sampled pairs for the locality CSV");
  report_cmd->add_option("--locality-seed", report.locality_seed, "Locality sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_bench(gen_config, gen_out);
    if (search_cmd->parsed()) return cmd_search(search);
    if (sweep_cmd->parsed()) {
      for (std::uint64_t s = 0; s < sweep_num_seeds; ++s) sweep.seeds.push_back(s);
      if (!sweep_seed_list.empty()) {
        std::istringstream in(sweep_seed_list);
        std::string item;
        while (std::getline(in, item, ',')) sweep.seeds.push_back(std::stoull(item));
      }
      if (sweep.k_list.empty()) sweep.k_list = {4};
      if (sweep.m_list.empty()) sweep.m_list = {4};
      return cmd_sweep(sweep);
    }
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const dsm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsm::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const dsm::SizeGuardError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitBudget;
  } catch (const dsm::NumericError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitBudget;
  } catch (const dsm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
