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
//
// The active-learning loop: per round, train on the labeled set, acquire a
// batch with the configured strategy, reveal labels and ID/OOD flags for the
// batch only, then grow I and O accordingly. Hidden flags of still-unlabeled
// rows are read exclusively here (reveal step) and by the metrics; strategies
// receive a strategy_context, which has no field for them.

#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simsel/dataset.hpp"
#include "simsel/parallel.hpp"
#include "simsel/strategies.hpp"

namespace simsel {

struct round_metrics {
  int round = 0;
  double test_accuracy = 0.0;
  int cumulative_id = 0;  // ID points acquired so far (initial pool excluded)
  int new_id = 0;
  double wall_time_s = 0.0;
  index_list chosen;
};

struct experiment_record {
  std::string method;
  std::uint64_t seed = 0;
  nlohmann::json config_echo;
  std::vector<round_metrics> rounds;
};

struct experiment_config {
  strategy_spec strategy;
  int budget = 30;
  int rounds = 10;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  train_config train_cfg;
  std::string data_path;  // echoed into records
  std::string out_dir;    // when nonempty, one JSON record per seed is written

  void validate() const {
    if (budget < 1) throw config_error("experiment_config: budget must be >= 1");
    if (rounds < 1) throw config_error("experiment_config: rounds must be >= 1");
    if (seeds.empty()) throw config_error("experiment_config: need at least one seed");
  }
};

namespace detail {

// Independent seed streams per purpose so adding one consumer does not
// shift another's draws.
constexpr std::uint64_t kModelStream = 0x1;
constexpr std::uint64_t kStrategyStream = 0x2;

inline nlohmann::json config_echo(const experiment_config& cfg) {
  nlohmann::json j;
  j["strategy"] = cfg.strategy.name();
  j["budget"] = cfg.budget;
  j["rounds"] = cfg.rounds;
  j["optimizer"] = to_string(cfg.strategy.optimizer);
  j["epsilon"] = cfg.strategy.epsilon;
  j["ridge"] = cfg.strategy.ridge;
  j["eta"] = cfg.strategy.eta;
  j["coreset_embedding"] = "gradient";
  j["data"] = cfg.data_path;
  j["train"] = {{"learning_rate", cfg.train_cfg.learning_rate},
                {"momentum", cfg.train_cfg.momentum},
                {"weight_decay", cfg.train_cfg.weight_decay},
                {"target_train_accuracy", cfg.train_cfg.target_train_accuracy},
                {"max_epochs", cfg.train_cfg.max_epochs},
                {"batch_size", cfg.train_cfg.batch_size}};
  return j;
}

inline double id_test_accuracy(const softmax_classifier& model, const dataset& ds,
                               const index_list& test_rows) {
  if (test_rows.empty()) return 0.0;
  int hits = 0;
  for (int row : test_rows) {
    const vector x = ds.features.row(row);
    if (model.hypothesized_label(x) == ds.labels[static_cast<std::size_t>(row)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(test_rows.size());
}

}  // namespace detail

inline experiment_record run_single_experiment(const experiment_config& cfg,
                                               const dataset& ds, std::uint64_t seed) {
  cfg.validate();
  const int n_id = ds.num_id_classes();
  if (n_id < 1) throw data_error("run_single_experiment: dataset has no ID classes");
  const int num_classes = n_id + 1;

  index_list labeled = ds.rows_in(split_kind::labeled);
  index_list unlabeled = ds.rows_in(split_kind::unlabeled);
  const index_list test_rows = ds.rows_in(split_kind::test);
  if (labeled.empty()) {
    throw data_error("run_single_experiment: the labeled split is empty");
  }
  std::sort(unlabeled.begin(), unlabeled.end());

  // Initial bookkeeping: known ID points seed the query side, any OOD points
  // already labeled go straight to the private side.
  index_list known_id;
  std::vector<int> known_id_labels;
  index_list known_ood;
  for (int row : labeled) {
    if (ds.is_ood[static_cast<std::size_t>(row)]) {
      known_ood.push_back(row);
    } else {
      known_id.push_back(row);
      known_id_labels.push_back(ds.labels[static_cast<std::size_t>(row)]);
    }
  }

  experiment_record record;
  record.method = cfg.strategy.name();
  record.seed = seed;
  record.config_echo = detail::config_echo(cfg);

  int cumulative_id = 0;
  for (int round = 1; round <= cfg.rounds; ++round) {
    const auto started = std::chrono::steady_clock::now();
    try {
      matrix train_x(static_cast<Eigen::Index>(labeled.size()), ds.dim());
      std::vector<int> train_y(labeled.size());
      for (std::size_t i = 0; i < labeled.size(); ++i) {
        train_x.row(static_cast<Eigen::Index>(i)) = ds.features.row(labeled[i]);
        train_y[i] = ds.is_ood[static_cast<std::size_t>(labeled[i])]
                         ? n_id
                         : ds.labels[static_cast<std::size_t>(labeled[i])];
      }
      train_config tc = cfg.train_cfg;
      tc.seed = mix_seed(mix_seed(seed, detail::kModelStream), static_cast<std::uint64_t>(round));
      const softmax_classifier model = train(train_x, train_y, num_classes, tc);

      const double accuracy = detail::id_test_accuracy(model, ds, test_rows);

      index_list chosen;
      if (!unlabeled.empty()) {
        strategy_context ctx;
        ctx.features = &ds.features;
        ctx.unlabeled = unlabeled;
        ctx.known_id = known_id;
        ctx.known_id_labels = known_id_labels;
        ctx.known_ood = known_ood;
        ctx.model = &model;
        ctx.num_classes = num_classes;
        ctx.seed = mix_seed(mix_seed(seed, detail::kStrategyStream),
                            static_cast<std::uint64_t>(round));
        chosen = select_batch(ctx, cfg.strategy, cfg.budget);
      }

      // Reveal step: the only place the hidden flags of acquired rows are read.
      int new_id = 0;
      for (int row : chosen) {
        const auto pos = std::lower_bound(unlabeled.begin(), unlabeled.end(), row);
        if (pos == unlabeled.end() || *pos != row) {
          throw data_error("strategy returned index " + std::to_string(row) +
                           " that is not unlabeled");
        }
        unlabeled.erase(pos);
        labeled.push_back(row);
        if (ds.is_ood[static_cast<std::size_t>(row)]) {
          known_ood.push_back(row);
        } else {
          known_id.push_back(row);
          known_id_labels.push_back(ds.labels[static_cast<std::size_t>(row)]);
          ++new_id;
        }
      }
      cumulative_id += new_id;

      round_metrics m;
      m.round = round;
      m.test_accuracy = accuracy;
      m.cumulative_id = cumulative_id;
      m.new_id = new_id;
      m.chosen = chosen;
      m.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      record.rounds.push_back(std::move(m));
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(round) + " (" +
                               cfg.strategy.name() + ", seed " + std::to_string(seed) +
                               "): " + e.what());
    }
  }
  return record;
}

// ---------------------------------------------------------------------------
// Record serialization. wall_time_s is the only nondeterministic field;
// strip_timing() removes it for bitwise comparisons.

inline nlohmann::json record_to_json(const experiment_record& record) {
  nlohmann::json j;
  j["method"] = record.method;
  j["seed"] = record.seed;
  j["config"] = record.config_echo;
  j["rounds"] = nlohmann::json::array();
  for (const auto& m : record.rounds) {
    j["rounds"].push_back({{"round", m.round},
                           {"test_accuracy", m.test_accuracy},
                           {"cumulative_id", m.cumulative_id},
                           {"new_id", m.new_id},
                           {"wall_time_s", m.wall_time_s},
                           {"chosen", m.chosen}});
  }
  return j;
}

inline experiment_record record_from_json(const nlohmann::json& j) {
  experiment_record record;
  record.method = j.at("method").get<std::string>();
  record.seed = j.at("seed").get<std::uint64_t>();
  record.config_echo = j.value("config", nlohmann::json::object());
  for (const auto& rj : j.at("rounds")) {
    round_metrics m;
    m.round = rj.at("round").get<int>();
    m.test_accuracy = rj.at("test_accuracy").get<double>();
    m.cumulative_id = rj.at("cumulative_id").get<int>();
    m.new_id = rj.value("new_id", 0);
    m.wall_time_s = rj.value("wall_time_s", 0.0);
    if (rj.contains("chosen")) m.chosen = rj.at("chosen").get<index_list>();
    record.rounds.push_back(std::move(m));
  }
  return record;
}

inline nlohmann::json strip_timing(nlohmann::json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

inline std::string record_filename(const experiment_record& record) {
  return record.method + "_seed" + std::to_string(record.seed) + ".json";
}

inline void write_records(const std::vector<experiment_record>& records,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& record : records) {
    const std::string path = (fs::path(out_dir) / record_filename(record)).string();
    std::ofstream os(path);
    if (!os) throw io_error("write_records: cannot open " + path);
    os << record_to_json(record).dump(2) << '\n';
    if (!os) throw io_error("write_records: write failed for " + path);
  }
}

inline std::vector<experiment_record> load_records_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<experiment_record> records;
  for (const auto& path : paths) {
    std::ifstream is(path);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw io_error("load_records_dir: bad JSON in " + path + ": " + e.what());
    }
    if (!j.contains("method") || !j.contains("rounds")) continue;  // not a record
    records.push_back(record_from_json(j));
  }
  if (records.empty()) throw io_error("load_records_dir: no records found in " + dir);
  return records;
}

// Runs every seed as an independent job (worker count capped by
// SIMSEL_THREADS) and optionally writes one JSON per seed.
inline std::vector<experiment_record> run_al_experiment(const experiment_config& cfg,
                                                        const dataset& ds) {
  cfg.validate();
  std::vector<experiment_record> records(cfg.seeds.size());
  parallel_for_jobs(static_cast<int>(cfg.seeds.size()), [&](int i) {
    records[static_cast<std::size_t>(i)] =
        run_single_experiment(cfg, ds, cfg.seeds[static_cast<std::size_t>(i)]);
  });
  if (!cfg.out_dir.empty()) write_records(records, cfg.out_dir);
  return records;
}

// ---------------------------------------------------------------------------
// Plot data: accuracy-vs-round and cumulative-ID-vs-round CSVs with one
// mean/std column pair per method.

inline void emit_plot_data(const std::vector<experiment_record>& records,
                           const std::string& out_dir) {
  if (records.empty()) throw config_error("emit_plot_data: no records");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<std::string> methods;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  std::sort(methods.begin(), methods.end());
  const std::size_t rounds = records.front().rounds.size();
  for (const auto& r : records) {
    if (r.rounds.size() != rounds) {
      throw data_error("emit_plot_data: records disagree on round count");
    }
  }

  const auto write_csv = [&](const std::string& name, auto metric) {
    std::ofstream os((fs::path(out_dir) / name).string());
    if (!os) throw io_error("emit_plot_data: cannot open " + name);
    os << "round";
    for (const auto& m : methods) os << ',' << m << "_mean," << m << "_std";
    os << '\n';
    for (std::size_t r = 0; r < rounds; ++r) {
      os << (r + 1);
      for (const auto& method : methods) {
        std::vector<double> vals;
        for (const auto& rec : records) {
          if (rec.method == method) vals.push_back(metric(rec.rounds[r]));
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double sd = 0.0;
        if (vals.size() > 1) {
          for (double v : vals) sd += (v - mean) * (v - mean);
          sd = std::sqrt(sd / static_cast<double>(vals.size() - 1));
        }
        os << ',' << detail::format_double(mean) << ',' << detail::format_double(sd);
      }
      os << '\n';
    }
  };
  write_csv("accuracy_vs_round.csv",
            [](const round_metrics& m) { return m.test_accuracy; });
  write_csv("cumulative_id_vs_round.csv",
            [](const round_metrics& m) { return static_cast<double>(m.cumulative_id); });
}

}  // namespace simsel
