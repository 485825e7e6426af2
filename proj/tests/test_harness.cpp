// Copyright 2026 The Authors.
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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "simsel/harness.hpp"
#include "simsel/scenario.hpp"

using namespace simsel;
using Catch::Approx;

namespace fs = std::filesystem;

namespace {

scenario_config tiny_scenario(std::uint64_t seed = 3) {
  scenario_config cfg;
  cfg.kind = scenario_kind::a;
  cfg.n_id_classes = 2;
  cfg.dim = 4;
  cfg.sizes = scenario_sizes{6, 16, 20, 16};
  cfg.separation = 10.0;
  cfg.seed = seed;
  return cfg;
}

experiment_config tiny_experiment(const std::string& strategy) {
  experiment_config cfg;
  cfg.strategy = parse_strategy(strategy);
  cfg.budget = 5;
  cfg.rounds = 3;
  cfg.seeds = {0, 1};
  cfg.train_cfg.max_epochs = 60;  // keep the tiny loops fast
  return cfg;
}

}  // namespace

TEST_CASE("the AL loop keeps its bookkeeping invariants") {
  const dataset ds = gen_scenario(tiny_scenario());
  for (const char* strategy : {"random", "flcmi"}) {
    const experiment_config cfg = tiny_experiment(strategy);
    const experiment_record record = run_single_experiment(cfg, ds, 0);
    REQUIRE(record.method == strategy);
    REQUIRE(record.rounds.size() == 3);

    std::set<int> acquired;
    int previous_cumulative = 0;
    for (std::size_t r = 0; r < record.rounds.size(); ++r) {
      const auto& m = record.rounds[r];
      REQUIRE(m.round == static_cast<int>(r) + 1);
      REQUIRE(static_cast<int>(m.chosen.size()) == 5);  // |U| never runs out here
      for (int row : m.chosen) {
        REQUIRE(ds.split[static_cast<std::size_t>(row)] == split_kind::unlabeled);
        REQUIRE(acquired.insert(row).second);  // never re-acquired
      }
      REQUIRE(m.cumulative_id >= previous_cumulative);  // nondecreasing
      REQUIRE(m.cumulative_id <= 5 * m.round);
      REQUIRE(m.cumulative_id - previous_cumulative == m.new_id);
      REQUIRE(m.test_accuracy >= 0.0);
      REQUIRE(m.test_accuracy <= 1.0);
      previous_cumulative = m.cumulative_id;
    }
    REQUIRE(acquired.size() == 15);  // |L| grew by exactly budget per round
  }
}

TEST_CASE("a budget above the remaining pool drains it") {
  scenario_config scen = tiny_scenario(9);
  scen.sizes = scenario_sizes{6, 4, 4, 8};
  const dataset ds = gen_scenario(scen);
  experiment_config cfg = tiny_experiment("random");
  cfg.budget = 6;
  cfg.rounds = 3;  // 8 unlabeled rows in total: rounds select 6, 2, 0
  const experiment_record record = run_single_experiment(cfg, ds, 1);
  REQUIRE(record.rounds[0].chosen.size() == 6);
  REQUIRE(record.rounds[1].chosen.size() == 2);
  REQUIRE(record.rounds[2].chosen.size() == 0);
}

TEST_CASE("records are bitwise deterministic modulo timing") {
  const dataset ds = gen_scenario(tiny_scenario(5));
  const experiment_config cfg = tiny_experiment("flcmi");
  const auto a = run_al_experiment(cfg, ds);
  const auto b = run_al_experiment(cfg, ds);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(strip_timing(record_to_json(a[i])).dump(2) ==
            strip_timing(record_to_json(b[i])).dump(2));
  }
}

TEST_CASE("hidden flags of unlabeled rows cannot steer any strategy") {
  const dataset original = gen_scenario(tiny_scenario(7));
  dataset tampered = original;
  // Flip the hidden flag (and the would-be revealed label) on a slice of the
  // unlabeled pool; the round-1 selection must not notice.
  int flipped = 0;
  for (int row : tampered.rows_in(split_kind::unlabeled)) {
    if (flipped >= 8) break;
    const auto i = static_cast<std::size_t>(row);
    tampered.is_ood[i] = tampered.is_ood[i] ? 0 : 1;
    tampered.labels[i] = tampered.is_ood[i] ? tampered.num_id_classes() : 0;
    ++flipped;
  }
  for (const char* strategy :
       {"flcmi", "logdetcmi", "entropy", "margin", "coreset", "badge", "random"}) {
    experiment_config cfg = tiny_experiment(strategy);
    cfg.rounds = 1;
    const auto a = run_single_experiment(cfg, original, 0);
    const auto b = run_single_experiment(cfg, tampered, 0);
    REQUIRE(a.rounds[0].chosen == b.rounds[0].chosen);
  }
}

TEST_CASE("record JSON round-trips and strips timing") {
  const dataset ds = gen_scenario(tiny_scenario(11));
  experiment_config cfg = tiny_experiment("random");
  cfg.rounds = 2;
  const experiment_record record = run_single_experiment(cfg, ds, 4);
  const nlohmann::json j = record_to_json(record);
  REQUIRE(j.at("config").at("coreset_embedding") == "gradient");
  REQUIRE(j.at("config").at("optimizer") == "lazy");
  const experiment_record back = record_from_json(j);
  REQUIRE(back.method == record.method);
  REQUIRE(back.seed == record.seed);
  REQUIRE(back.rounds.size() == record.rounds.size());
  REQUIRE(back.rounds[1].chosen == record.rounds[1].chosen);

  const nlohmann::json stripped = strip_timing(j);
  REQUIRE(!stripped.at("rounds")[0].contains("wall_time_s"));
  REQUIRE(j.at("rounds")[0].contains("wall_time_s"));
}

TEST_CASE("records write to and load from a directory") {
  const dataset ds = gen_scenario(tiny_scenario(13));
  experiment_config cfg = tiny_experiment("random");
  const std::string dir = (fs::temp_directory_path() / "simsel_records_rt").string();
  fs::remove_all(dir);
  cfg.out_dir = dir;
  const auto written = run_al_experiment(cfg, ds);
  REQUIRE(fs::exists(fs::path(dir) / "random_seed0.json"));
  REQUIRE(fs::exists(fs::path(dir) / "random_seed1.json"));
  const auto loaded = load_records_dir(dir);
  REQUIRE(loaded.size() == written.size());
  REQUIRE(strip_timing(record_to_json(loaded[0])).dump() ==
          strip_timing(record_to_json(written[0])).dump());
  fs::remove_all(dir);
  REQUIRE_THROWS_AS(load_records_dir("/nonexistent_simsel_dir"), std::exception);
}

TEST_CASE("binary and CSV datasets drive identical experiments") {
  const dataset ds = gen_scenario(tiny_scenario(17));
  const std::string dir = (fs::temp_directory_path() / "simsel_bin_run").string();
  fs::remove_all(dir);
  const std::string manifest = write_dataset_with_binary(ds, dir);
  const dataset via_manifest = read_dataset(manifest);
  const dataset via_csv = read_dataset(dir + "/dataset.csv");
  experiment_config cfg = tiny_experiment("flcmi");
  cfg.rounds = 2;
  const auto a = run_single_experiment(cfg, via_manifest, 0);
  const auto b = run_single_experiment(cfg, via_csv, 0);
  REQUIRE(strip_timing(record_to_json(a)).dump() == strip_timing(record_to_json(b)).dump());
  fs::remove_all(dir);
}

TEST_CASE("failures carry round context") {
  dataset ds = gen_scenario(tiny_scenario(19));
  for (auto& s : ds.split) {
    if (s == split_kind::labeled) s = split_kind::test;  // empty the labeled split
  }
  const experiment_config cfg = tiny_experiment("random");
  try {
    run_single_experiment(cfg, ds, 0);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    REQUIRE(std::string(e.what()).find("labeled split is empty") != std::string::npos);
  }

  dataset ds2 = gen_scenario(tiny_scenario(19));
  experiment_config bad = tiny_experiment("flmi");
  // Remove every labeled ID row's class information by marking them OOD:
  // the MI query set is then empty and the strategy must fail in round 1.
  for (int row : ds2.rows_in(split_kind::labeled)) {
    ds2.is_ood[static_cast<std::size_t>(row)] = 1;
    ds2.labels[static_cast<std::size_t>(row)] = ds2.num_id_classes();
  }
  try {
    run_single_experiment(bad, ds2, 0);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    REQUIRE(std::string(e.what()).find("round 1") != std::string::npos);
  }
}

TEST_CASE("plot data columns reproduce hand averages") {
  const dataset ds = gen_scenario(tiny_scenario(23));
  experiment_config cfg = tiny_experiment("random");
  const auto records = run_al_experiment(cfg, ds);
  const std::string dir = (fs::temp_directory_path() / "simsel_plots").string();
  fs::remove_all(dir);
  emit_plot_data(records, dir);

  std::ifstream is(dir + "/accuracy_vs_round.csv");
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "round,random_mean,random_std");
  std::string line;
  int round = 0;
  while (std::getline(is, line)) {
    const auto fields = detail::split_csv_line(line);
    REQUIRE(fields.size() == 3);
    double mean = 0.0;
    for (const auto& r : records) mean += r.rounds[static_cast<std::size_t>(round)].test_accuracy;
    mean /= static_cast<double>(records.size());
    REQUIRE(std::stod(fields[1]) == Approx(mean).margin(1e-12));
    ++round;
  }
  REQUIRE(round == 3);

  // A single record gives a zero std column.
  emit_plot_data({records[0]}, dir);
  std::ifstream is2(dir + "/cumulative_id_vs_round.csv");
  std::getline(is2, header);
  std::getline(is2, line);
  REQUIRE(detail::split_csv_line(line)[2] == "0");
  fs::remove_all(dir);
}

TEST_CASE("experiment configs are validated") {
  const dataset ds = gen_scenario(tiny_scenario(29));
  experiment_config cfg = tiny_experiment("random");
  cfg.budget = 0;
  REQUIRE_THROWS_AS(run_al_experiment(cfg, ds), config_error);
  cfg = tiny_experiment("random");
  cfg.rounds = 0;
  REQUIRE_THROWS_AS(run_al_experiment(cfg, ds), config_error);
  cfg = tiny_experiment("random");
  cfg.seeds.clear();
  REQUIRE_THROWS_AS(run_al_experiment(cfg, ds), config_error);
}
