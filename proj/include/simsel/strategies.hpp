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
// One acquisition round per strategy. Strategies see only the
// strategy_context view -- labels of already-labeled points, the trained
// model, and raw features -- never the hidden ID/OOD flags of the unlabeled
// pool. All of them return exactly min(budget, |U|) distinct unlabeled rows.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simsel/model.hpp"
#include "simsel/optimizer.hpp"

namespace simsel {

enum class optimizer_kind { naive, lazy, stochastic };

inline const char* to_string(optimizer_kind k) {
  switch (k) {
    case optimizer_kind::naive: return "naive";
    case optimizer_kind::lazy: return "lazy";
    case optimizer_kind::stochastic: return "stochastic";
  }
  return "?";
}

inline optimizer_kind optimizer_kind_from_string(const std::string& s) {
  if (s == "naive") return optimizer_kind::naive;
  if (s == "lazy") return optimizer_kind::lazy;
  if (s == "stochastic") return optimizer_kind::stochastic;
  throw config_error("unknown optimizer: " + s);
}

enum class strategy_family { sim, entropy, margin, coreset, badge, random_pick };

struct strategy_spec {
  strategy_family family = strategy_family::sim;
  sim_variant variant = sim_variant::flcmi;  // used when family == sim
  optimizer_kind optimizer = optimizer_kind::lazy;
  double epsilon = 0.01;  // stochastic greedy sampling parameter
  double ridge = 1e-2;    // diagonal ridge for the LogDet family kernels
  double eta = 1.0;       // query-relevance magnification
  greedy_options greedy;

  std::string name() const {
    switch (family) {
      case strategy_family::sim: return to_string(variant);
      case strategy_family::entropy: return "entropy";
      case strategy_family::margin: return "margin";
      case strategy_family::coreset: return "coreset";
      case strategy_family::badge: return "badge";
      case strategy_family::random_pick: return "random";
    }
    return "?";
  }
};

inline strategy_spec parse_strategy(const std::string& name) {
  strategy_spec spec;
  if (name == "entropy") {
    spec.family = strategy_family::entropy;
  } else if (name == "margin") {
    spec.family = strategy_family::margin;
  } else if (name == "coreset") {
    spec.family = strategy_family::coreset;
  } else if (name == "badge") {
    spec.family = strategy_family::badge;
  } else if (name == "random") {
    spec.family = strategy_family::random_pick;
  } else {
    spec.family = strategy_family::sim;
    spec.variant = sim_variant_from_string(name);
  }
  return spec;
}

// The oracle-isolated view handed to strategies. Hidden ID/OOD flags and
// labels of unlabeled rows have no field here by design.
struct strategy_context {
  const matrix* features = nullptr;   // all dataset rows
  index_list unlabeled;               // U, global row indices
  index_list known_id;                // I
  std::vector<int> known_id_labels;   // aligned with known_id
  index_list known_ood;               // O; their class is num_classes - 1
  const softmax_classifier* model = nullptr;
  int num_classes = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_model(const strategy_context& ctx, const char* who) {
  if (ctx.model == nullptr) {
    throw config_error(std::string(who) + ": requires a trained model");
  }
  if (ctx.features == nullptr) {
    throw config_error(std::string(who) + ": requires features");
  }
}

inline index_list sorted_unlabeled(const strategy_context& ctx) {
  index_list u = ctx.unlabeled;
  std::sort(u.begin(), u.end());
  return u;
}

// Hypothesized-label gradient embeddings for the given rows.
inline matrix hypothesized_gradients(const strategy_context& ctx, const index_list& rows) {
  const auto& model = *ctx.model;
  matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(model.classes()) * model.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const vector x = ctx.features->row(rows[i]);
    out.row(static_cast<Eigen::Index>(i)) =
        model.gradient_embedding(x, model.hypothesized_label(x)).transpose();
  }
  return out;
}

inline matrix true_label_gradients(const strategy_context& ctx, const index_list& rows,
                                   const std::vector<int>& row_labels) {
  const auto& model = *ctx.model;
  matrix out(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(model.classes()) * model.dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const vector x = ctx.features->row(rows[i]);
    out.row(static_cast<Eigen::Index>(i)) =
        model.gradient_embedding(x, row_labels[i]).transpose();
  }
  return out;
}

// Top `budget` global ids by (score, id) ascending.
inline index_list take_by_score(std::vector<std::pair<double, int>> scored, int budget) {
  std::sort(scored.begin(), scored.end());
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(budget),
                                                 scored.size());
  index_list out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace detail

// Gradient-kernel SIM selection: hypothesized-label gradients for U, true
// labels for I and O, joint cosine kernel, Q <- I, P <- O, then greedy.
inline index_list diagnose_select(const strategy_context& ctx, const strategy_spec& spec,
                                  int budget) {
  detail::require_model(ctx, "diagnose_select");
  const index_list u = detail::sorted_unlabeled(ctx);
  if (u.empty() || budget <= 0) return {};

  if (takes_query(spec.variant) && ctx.known_id.empty()) {
    throw config_error(std::string(to_string(spec.variant)) +
                       ": query set is empty (no ID points discovered yet); fall back to "
                       "a conditional-gain variant (flcg/logdetcg)");
  }

  const matrix g_u = detail::hypothesized_gradients(ctx, u);
  matrix g_q(0, g_u.cols());
  matrix g_p(0, g_u.cols());
  if (takes_query(spec.variant)) {
    g_q = detail::true_label_gradients(ctx, ctx.known_id, ctx.known_id_labels);
  }
  if (takes_private(spec.variant) && !ctx.known_ood.empty()) {
    // An empty O reduces the CMI variants to their MI counterparts.
    const std::vector<int> ood_labels(ctx.known_ood.size(), ctx.num_classes - 1);
    g_p = detail::true_label_gradients(ctx, ctx.known_ood, ood_labels);
  }

  const bool fl = is_fl(spec.variant);
  const similarity_kernel kernel =
      assemble_joint_kernel(g_u, g_q, g_p, /*rescale=*/fl,
                            /*ridge=*/fl ? 0.0 : spec.ridge);
  objective_config cfg;
  cfg.ground = kernel.regions.unlabeled_indices();
  cfg.query = kernel.regions.query_indices();
  cfg.priv = kernel.regions.private_indices();
  cfg.eta = spec.eta;
  auto objective = make_objective(spec.variant, kernel, std::move(cfg));

  selection_result sel;
  const index_list candidates = kernel.regions.unlabeled_indices();
  switch (spec.optimizer) {
    case optimizer_kind::naive:
      sel = naive_greedy(*objective, candidates, budget, spec.greedy);
      break;
    case optimizer_kind::lazy:
      sel = lazy_greedy(*objective, candidates, budget, spec.greedy);
      break;
    case optimizer_kind::stochastic:
      sel = stochastic_greedy(*objective, candidates, budget, spec.epsilon, ctx.seed,
                              spec.greedy);
      break;
  }

  index_list out;
  out.reserve(sel.chosen.size());
  for (int pos : sel.chosen) out.push_back(u[static_cast<std::size_t>(pos)]);
  return out;
}

// Top-B unlabeled rows by Shannon entropy of the predicted distribution.
inline index_list entropy_select(const strategy_context& ctx, int budget) {
  detail::require_model(ctx, "entropy_select");
  const index_list u = detail::sorted_unlabeled(ctx);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(u.size());
  for (int row : u) {
    const vector p = ctx.model->predict_proba(ctx.features->row(row));
    double entropy = 0.0;
    for (Eigen::Index c = 0; c < p.size(); ++c) {
      if (p[c] > 0.0) entropy -= p[c] * std::log(p[c]);
    }
    scored.emplace_back(-entropy, row);  // highest entropy first
  }
  return detail::take_by_score(std::move(scored), budget);
}

// Bottom-B by the gap between the top two predicted probabilities.
inline index_list margin_select(const strategy_context& ctx, int budget) {
  detail::require_model(ctx, "margin_select");
  if (ctx.model->classes() < 2) {
    throw config_error("margin_select: needs at least two classes");
  }
  const index_list u = detail::sorted_unlabeled(ctx);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(u.size());
  for (int row : u) {
    vector p = ctx.model->predict_proba(ctx.features->row(row));
    double first = -1.0, second = -1.0;
    for (Eigen::Index c = 0; c < p.size(); ++c) {
      if (p[c] > first) {
        second = first;
        first = p[c];
      } else if (p[c] > second) {
        second = p[c];
      }
    }
    scored.emplace_back(first - second, row);
  }
  return detail::take_by_score(std::move(scored), budget);
}

// Greedy k-center on gradient embeddings: repeatedly add the unlabeled point
// farthest from the labeled-plus-chosen cover.
inline index_list coreset_select(const strategy_context& ctx, int budget) {
  detail::require_model(ctx, "coreset_select");
  const index_list u = detail::sorted_unlabeled(ctx);
  if (u.empty() || budget <= 0) return {};

  const matrix g_u = detail::hypothesized_gradients(ctx, u);
  index_list labeled = ctx.known_id;
  std::vector<int> labeled_labels = ctx.known_id_labels;
  for (int row : ctx.known_ood) {
    labeled.push_back(row);
    labeled_labels.push_back(ctx.num_classes - 1);
  }
  const matrix g_l = detail::true_label_gradients(ctx, labeled, labeled_labels);

  const auto nu = static_cast<Eigen::Index>(u.size());
  vector min_sq = vector::Constant(nu, std::numeric_limits<double>::infinity());
  for (Eigen::Index l = 0; l < g_l.rows(); ++l) {
    for (Eigen::Index i = 0; i < nu; ++i) {
      min_sq[i] = std::min(min_sq[i], (g_u.row(i) - g_l.row(l)).squaredNorm());
    }
  }

  index_list out;
  std::vector<char> taken(u.size(), 0);
  const int take = std::min<int>(budget, static_cast<int>(u.size()));
  for (int b = 0; b < take; ++b) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < nu; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || min_sq[i] > min_sq[best]) best = i;
    }
    taken[static_cast<std::size_t>(best)] = 1;
    out.push_back(u[static_cast<std::size_t>(best)]);
    for (Eigen::Index i = 0; i < nu; ++i) {
      min_sq[i] = std::min(min_sq[i], (g_u.row(i) - g_u.row(best)).squaredNorm());
    }
  }
  return out;
}

// K-means++ seeding on hypothesized-label gradient embeddings: the first
// center is drawn proportionally to the squared gradient norm, later centers
// by D^2 sampling; the B seeds are the batch.
inline index_list badge_select(const strategy_context& ctx, int budget) {
  detail::require_model(ctx, "badge_select");
  const index_list u = detail::sorted_unlabeled(ctx);
  if (u.empty() || budget <= 0) return {};
  const matrix g_u = detail::hypothesized_gradients(ctx, u);
  rng64 rng(ctx.seed);

  std::vector<double> weights(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    weights[i] = g_u.row(static_cast<Eigen::Index>(i)).squaredNorm();
  }

  index_list out;
  std::vector<char> taken(u.size(), 0);
  vector min_sq = vector::Constant(static_cast<Eigen::Index>(u.size()),
                                   std::numeric_limits<double>::infinity());
  const int take = std::min<int>(budget, static_cast<int>(u.size()));
  for (int b = 0; b < take; ++b) {
    std::vector<double> w = weights;
    if (b > 0) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        w[i] = min_sq[static_cast<Eigen::Index>(i)];
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (taken[i]) w[i] = 0.0;
    }
    std::size_t pick = rng.next_weighted(w);
    while (taken[pick]) pick = (pick + 1) % u.size();  // zero-mass fallback
    taken[pick] = 1;
    out.push_back(u[pick]);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(u.size()); ++i) {
      min_sq[i] = std::min(
          min_sq[i],
          (g_u.row(i) - g_u.row(static_cast<Eigen::Index>(pick))).squaredNorm());
    }
  }
  return out;
}

inline index_list random_select(const strategy_context& ctx, int budget) {
  const index_list u = detail::sorted_unlabeled(ctx);
  rng64 rng(ctx.seed);
  index_list out = rng.sample_without_replacement(
      u, static_cast<std::size_t>(std::max(budget, 0)));
  return out;
}

inline index_list select_batch(const strategy_context& ctx, const strategy_spec& spec,
                               int budget) {
  if (budget < 0) throw config_error("select_batch: budget must be >= 0");
  switch (spec.family) {
    case strategy_family::sim: return diagnose_select(ctx, spec, budget);
    case strategy_family::entropy: return entropy_select(ctx, budget);
    case strategy_family::margin: return margin_select(ctx, budget);
    case strategy_family::coreset: return coreset_select(ctx, budget);
    case strategy_family::badge: return badge_select(ctx, budget);
    case strategy_family::random_pick: return random_select(ctx, budget);
  }
  throw config_error("select_batch: unknown strategy family");
}

}  // namespace simsel
