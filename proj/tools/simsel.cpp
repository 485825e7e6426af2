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

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simsel/harness.hpp"
#include "simsel/penalty.hpp"
#include "simsel/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace simsel;

struct gen_args {
  std::string kind = "A";
  std::string preset;
  int classes = 7;
  int dim = 8;
  int labeled = 140;
  int unlabeled_id = 1061;
  int unlabeled_ood = 5000;
  int test = 1000;
  double separation = 10.0;
  double class_spread = 3.0;
  std::uint64_t seed = 0;
  std::string out = "scenario";
  bool binary = false;
};

void apply_preset(gen_args& args, const CLI::App& cmd) {
  struct preset_values {
    const char* kind;
    int classes, dim, labeled, unlabeled_id, unlabeled_ood, test;
  };
  preset_values p{};
  if (args.preset == "scenario-a") {
    p = {"A", 7, 8, 140, 1061, 5000, 1000};
  } else if (args.preset == "scenario-b") {
    p = {"B", 11, 12, 110, 1650, 8000, 1000};
  } else if (args.preset == "scenario-c") {
    p = {"C", 11, 12, 50, 750, 8000, 1000};
  } else if (args.preset == "scenario-a-tenth") {
    p = {"A", 7, 8, 14, 106, 500, 100};
  } else {
    throw config_error("unknown preset: " + args.preset +
                       " (expected scenario-a | scenario-b | scenario-c | scenario-a-tenth)");
  }
  // Explicit flags override the preset.
  if (cmd.count("--kind") == 0) args.kind = p.kind;
  if (cmd.count("--classes") == 0) args.classes = p.classes;
  if (cmd.count("--dim") == 0) args.dim = p.dim;
  if (cmd.count("--labeled") == 0) args.labeled = p.labeled;
  if (cmd.count("--unlabeled-id") == 0) args.unlabeled_id = p.unlabeled_id;
  if (cmd.count("--unlabeled-ood") == 0) args.unlabeled_ood = p.unlabeled_ood;
  if (cmd.count("--test") == 0) args.test = p.test;
}

int run_gen_scenario(gen_args& args, const CLI::App& cmd) {
  if (!args.preset.empty()) apply_preset(args, cmd);
  scenario_config cfg;
  cfg.kind = scenario_kind_from_string(args.kind);
  cfg.n_id_classes = args.classes;
  cfg.dim = args.dim;
  cfg.sizes = scenario_sizes{args.labeled, args.unlabeled_id, args.unlabeled_ood, args.test};
  cfg.separation = args.separation;
  cfg.class_spread = args.class_spread;
  cfg.seed = args.seed;
  const dataset ds = gen_scenario(cfg);
  fs::create_directories(args.out);
  if (args.binary) {
    const std::string manifest = write_dataset_with_binary(ds, args.out);
    std::cout << "wrote " << manifest << " (+ dataset.csv, features.bin)\n";
  } else {
    const std::string csv = (fs::path(args.out) / "dataset.csv").string();
    write_dataset_csv(ds, csv);
    std::cout << "wrote " << csv << "\n";
  }
  std::cout << "rows: " << ds.rows() << " (labeled " << args.labeled << ", unlabeled "
            << (args.unlabeled_id + args.unlabeled_ood) << ", test " << args.test
            << "), classes: " << ds.num_id_classes() << "\n";
  return 0;
}

struct run_args {
  std::string data;
  std::string strategy = "flcmi";
  int budget = 30;
  int rounds = 10;
  int seeds = 5;
  std::uint64_t base_seed = 0;
  double epsilon = 0.01;
  std::string optimizer = "lazy";
  double ridge = 0.01;
  double eta = 1.0;
  bool stop_nonpositive = false;
  std::string out = "results";
  double lr = 1e-3;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double target_acc = 0.99;
  int max_epochs = 500;
  int batch_size = 32;
};

int run_experiment(const run_args& args) {
  const dataset ds = read_dataset(args.data);
  experiment_config cfg;
  cfg.strategy = parse_strategy(args.strategy);
  cfg.strategy.optimizer = optimizer_kind_from_string(args.optimizer);
  cfg.strategy.epsilon = args.epsilon;
  cfg.strategy.ridge = args.ridge;
  cfg.strategy.eta = args.eta;
  cfg.strategy.greedy.stop_at_nonpositive_gain = args.stop_nonpositive;
  cfg.budget = args.budget;
  cfg.rounds = args.rounds;
  cfg.seeds.clear();
  for (int s = 0; s < args.seeds; ++s) {
    cfg.seeds.push_back(args.base_seed + static_cast<std::uint64_t>(s));
  }
  cfg.train_cfg.learning_rate = args.lr;
  cfg.train_cfg.momentum = args.momentum;
  cfg.train_cfg.weight_decay = args.weight_decay;
  cfg.train_cfg.target_train_accuracy = args.target_acc;
  cfg.train_cfg.max_epochs = args.max_epochs;
  cfg.train_cfg.batch_size = args.batch_size;
  cfg.data_path = args.data;
  cfg.out_dir = args.out;

  const auto records = run_al_experiment(cfg, ds);
  for (const auto& record : records) {
    const auto& last = record.rounds.back();
    std::cout << record.method << " seed " << record.seed << ": final accuracy "
              << last.test_accuracy << ", ID acquired " << last.cumulative_id << "/"
              << cfg.budget * cfg.rounds << "\n";
  }
  std::cout << "wrote " << records.size() << " records to " << args.out << "\n";
  return 0;
}

struct select_args {
  std::string kernel;
  std::string features;
  std::string variant = "flcmi";
  std::string query;
  std::string priv;
  int budget = 10;
  std::string optimizer = "lazy";
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  double ridge = 0.01;
  double eta = 1.0;
  bool rescale = false;
  std::string save_kernel;
  std::string out;
};

index_list parse_index_list(const std::string& text) {
  index_list out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(std::stoi(token));
  }
  return out;
}

int run_select(const select_args& args) {
  if (args.kernel.empty() == args.features.empty()) {
    throw config_error("select: pass exactly one of --kernel or --features");
  }
  const sim_variant variant = sim_variant_from_string(args.variant);

  similarity_kernel kernel;
  if (!args.kernel.empty()) {
    kernel = load_kernel_cache(args.kernel);
  } else {
    const dataset ds = read_dataset(args.features);
    kernel = kernel_from_matrix(cosine_similarity_matrix(ds.features, ds.features));
  }
  if (args.rescale || (is_fl(variant) && !kernel.nonnegative())) {
    kernel = rescale_nonnegative(std::move(kernel));
  }
  if (is_logdet(variant) && args.ridge > 0.0) {
    kernel = regularize_psd(std::move(kernel), args.ridge);
  }
  if (!args.save_kernel.empty()) save_kernel_cache(kernel, args.save_kernel);

  objective_config cfg;
  cfg.query = parse_index_list(args.query);
  cfg.priv = parse_index_list(args.priv);
  cfg.eta = args.eta;
  if (takes_query(variant) && cfg.query.empty()) {
    throw config_error("select: variant " + args.variant + " needs --query indices");
  }
  if (!takes_query(variant)) cfg.query.clear();
  if (!takes_private(variant)) cfg.priv.clear();
  std::unordered_set<int> excluded(cfg.query.begin(), cfg.query.end());
  excluded.insert(cfg.priv.begin(), cfg.priv.end());
  for (int i = 0; i < kernel.size(); ++i) {
    if (!excluded.count(i)) cfg.ground.push_back(i);
  }
  const index_list candidates = cfg.ground;

  auto objective = make_objective(variant, kernel, std::move(cfg));
  selection_result sel;
  switch (optimizer_kind_from_string(args.optimizer)) {
    case optimizer_kind::naive:
      sel = naive_greedy(*objective, candidates, args.budget);
      break;
    case optimizer_kind::lazy:
      sel = lazy_greedy(*objective, candidates, args.budget);
      break;
    case optimizer_kind::stochastic:
      sel = stochastic_greedy(*objective, candidates, args.budget, args.epsilon, args.seed);
      break;
  }

  nlohmann::json j;
  j["variant"] = args.variant;
  j["budget"] = args.budget;
  j["query"] = parse_index_list(args.query);
  j["private"] = parse_index_list(args.priv);
  j["chosen"] = sel.chosen;
  j["gains"] = sel.gains;
  j["objective_value"] = sel.objective_value;
  j["evaluations"] = sel.evaluations;
  if (args.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(args.out);
    if (!os) throw io_error("select: cannot open " + args.out);
    os << j.dump(2) << '\n';
    std::cout << "wrote " << args.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subset selection with submodular information measures and an "
               "OOD-aware active-learning harness"};
  app.require_subcommand(1);

  gen_args gen;
  auto* gen_cmd = app.add_subcommand("gen-scenario", "Generate a synthetic OOD scenario");
  gen_cmd->add_option("--kind", gen.kind, "Scenario kind: A|B|C|D");
  gen_cmd->add_option("--preset", gen.preset,
                      "scenario-a | scenario-b | scenario-c | scenario-a-tenth");
  gen_cmd->add_option("--classes", gen.classes, "Number of ID classes");
  gen_cmd->add_option("--dim", gen.dim, "Feature dimensionality");
  gen_cmd->add_option("--labeled", gen.labeled, "Initial labeled (ID-only) rows");
  gen_cmd->add_option("--unlabeled-id", gen.unlabeled_id, "Unlabeled ID rows");
  gen_cmd->add_option("--unlabeled-ood", gen.unlabeled_ood, "Unlabeled OOD rows");
  gen_cmd->add_option("--test", gen.test, "Held-out ID test rows");
  gen_cmd->add_option("--separation", gen.separation, "ID/OOD separation scale");
  gen_cmd->add_option("--class-spread", gen.class_spread, "ID class simplex scale");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_flag("--binary", gen.binary, "Also write features.bin + manifest.json");

  run_args runv;
  auto* run_cmd = app.add_subcommand("run", "Run an active-learning experiment");
  run_cmd->add_option("--data", runv.data, "Dataset CSV or manifest JSON")->required();
  run_cmd->add_option("--strategy", runv.strategy,
                      "flmi|logdetmi|flcg|logdetcg|flcmi|logdetcmi|entropy|margin|"
                      "coreset|badge|random");
  run_cmd->add_option("--budget", runv.budget, "Points acquired per round");
  run_cmd->add_option("--rounds", runv.rounds, "Number of selection rounds");
  run_cmd->add_option("--seeds", runv.seeds, "Number of repetitions");
  run_cmd->add_option("--base-seed", runv.base_seed, "First seed value");
  run_cmd->add_option("--epsilon", runv.epsilon, "Stochastic greedy epsilon");
  run_cmd->add_option("--optimizer", runv.optimizer, "naive|lazy|stochastic");
  run_cmd->add_option("--ridge", runv.ridge, "Diagonal ridge for LogDet kernels");
  run_cmd->add_option("--eta", runv.eta, "Query-relevance magnification");
  run_cmd->add_flag("--stop-nonpositive", runv.stop_nonpositive,
                    "Stop a greedy run at the first non-positive gain");
  run_cmd->add_option("--out", runv.out, "Output directory for result records");
  run_cmd->add_option("--lr", runv.lr, "Initial learning rate");
  run_cmd->add_option("--momentum", runv.momentum, "SGD momentum");
  run_cmd->add_option("--weight-decay", runv.weight_decay, "Weight decay");
  run_cmd->add_option("--target-acc", runv.target_acc, "Target train accuracy");
  run_cmd->add_option("--max-epochs", runv.max_epochs, "Epoch cap");
  run_cmd->add_option("--batch-size", runv.batch_size, "Mini-batch size");

  std::string pm_records = "results";
  double pm_alpha = 0.05;
  std::string pm_out = "penalty_matrix.csv";
  auto* pm_cmd = app.add_subcommand("penalty-matrix",
                                    "Pairwise significance matrix from result records");
  pm_cmd->add_option("--records", pm_records, "Directory of result JSONs");
  pm_cmd->add_option("--alpha", pm_alpha, "Significance level");
  pm_cmd->add_option("--out", pm_out, "Output CSV path");

  std::string plot_records = "results";
  std::string plot_out = "plots";
  auto* plot_cmd = app.add_subcommand("plot-data",
                                      "Accuracy and cumulative-ID CSVs from records");
  plot_cmd->add_option("--records", plot_records, "Directory of result JSONs");
  plot_cmd->add_option("--out", plot_out, "Output directory");

  select_args sel;
  auto* sel_cmd = app.add_subcommand("select", "One-shot subset selection");
  sel_cmd->add_option("--kernel", sel.kernel, "Kernel cache file (SIMK)");
  sel_cmd->add_option("--features", sel.features, "Dataset CSV or manifest JSON");
  sel_cmd->add_option("--variant", sel.variant, "SIM variant");
  sel_cmd->add_option("--query", sel.query, "Comma-separated query indices");
  sel_cmd->add_option("--private", sel.priv, "Comma-separated private indices");
  sel_cmd->add_option("--budget", sel.budget, "Selection budget");
  sel_cmd->add_option("--optimizer", sel.optimizer, "naive|lazy|stochastic");
  sel_cmd->add_option("--epsilon", sel.epsilon, "Stochastic greedy epsilon");
  sel_cmd->add_option("--seed", sel.seed, "Stochastic greedy seed");
  sel_cmd->add_option("--ridge", sel.ridge, "Diagonal ridge for LogDet variants");
  sel_cmd->add_option("--eta", sel.eta, "Query-relevance magnification");
  sel_cmd->add_flag("--rescale", sel.rescale, "Force the (1+s)/2 rescale");
  sel_cmd->add_option("--save-kernel", sel.save_kernel, "Write the kernel cache here");
  sel_cmd->add_option("--out", sel.out, "Write the selection JSON here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return run_gen_scenario(gen, *gen_cmd);
    if (run_cmd->parsed()) return run_experiment(runv);
    if (pm_cmd->parsed()) {
      const auto records = load_records_dir(pm_records);
      const auto result = penalty_matrix(records, pm_alpha);
      write_penalty_csv(result, pm_out);
      std::cout << "wrote " << pm_out << " (" << result.methods.size() << " methods, "
                << result.rounds << " rounds)\n";
      return 0;
    }
    if (plot_cmd->parsed()) {
      const auto records = load_records_dir(plot_records);
      emit_plot_data(records, plot_out);
      std::cout << "wrote plot CSVs to " << plot_out << "\n";
      return 0;
    }
    if (sel_cmd->parsed()) return run_select(sel);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
