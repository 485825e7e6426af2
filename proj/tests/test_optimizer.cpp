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

#include <algorithm>

#include "helpers.hpp"
#include "simsel/optimizer.hpp"

using namespace simsel;
using Catch::Approx;
using test_helpers::range_list;

namespace {

// Plain facility location = conditional gain with an empty private set.
std::unique_ptr<acquisition_objective> plain_fl(const similarity_kernel& k) {
  objective_config cfg;
  cfg.ground = range_list(0, k.size());
  return make_objective(sim_variant::flcg, k, std::move(cfg));
}

std::unique_ptr<acquisition_objective> plain_logdet(const similarity_kernel& k) {
  objective_config cfg;
  cfg.ground = range_list(0, k.size());
  return make_objective(sim_variant::logdetcg, k, std::move(cfg));
}

// Exhaustive search over all subsets of size exactly `budget`.
double brute_force_opt(acquisition_objective& obj, const index_list& pool, int budget) {
  index_list subset;
  double best = -std::numeric_limits<double>::infinity();
  const std::function<void(std::size_t)> recurse = [&](std::size_t start) {
    if (static_cast<int>(subset.size()) == budget) {
      best = std::max(best, obj.evaluate(subset));
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      subset.push_back(pool[i]);
      recurse(i + 1);
      subset.pop_back();
    }
  };
  recurse(0);
  return best;
}

}  // namespace

TEST_CASE("naive greedy basics") {
  matrix m(3, 3);
  m << 1, .8, .2, .8, 1, .4, .2, .4, 1;
  const similarity_kernel k = kernel_from_matrix(m);
  auto obj = plain_fl(k);

  const auto empty = naive_greedy(*obj, range_list(0, 3), 0);
  REQUIRE(empty.chosen.empty());
  REQUIRE(empty.objective_value == 0.0);

  // Column sums 2.0, 2.2, 1.6: the first pick is index 1.
  const auto one = naive_greedy(*obj, range_list(0, 3), 1);
  REQUIRE(one.chosen == index_list{1});
  REQUIRE(one.objective_value == Approx(2.2));

  // Budget above the pool selects everything.
  const auto all = naive_greedy(*obj, range_list(0, 3), 10);
  REQUIRE(all.chosen.size() == 3);

  REQUIRE_THROWS_AS(naive_greedy(*obj, index_list{}, 2), config_error);
  REQUIRE_THROWS_AS(naive_greedy(*obj, range_list(0, 3), -1), config_error);
  REQUIRE_THROWS_AS(naive_greedy(*obj, index_list{1, 1}, 1), data_error);
}

TEST_CASE("naive greedy achieves the (1 - 1/e) bound") {
  rng64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 10);
    auto obj = plain_fl(k);
    const index_list pool = range_list(0, 10);
    const auto greedy = naive_greedy(*obj, pool, 3);
    const double opt = brute_force_opt(*obj, pool, 3);
    REQUIRE(greedy.objective_value >= (1.0 - std::exp(-1.0)) * opt - 1e-9);
  }
}

TEST_CASE("lazy greedy matches naive selections with fewer evaluations") {
  rng64 rng(34);
  long lazy_total = 0;
  long naive_total = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const bool fl = trial % 2 == 0;
    const similarity_kernel k = fl ? test_helpers::random_rescaled_kernel(rng, 12)
                                   : test_helpers::random_pd_kernel(rng, 12, 0.2);
    auto obj = fl ? plain_fl(k) : plain_logdet(k);
    const index_list pool = range_list(0, 12);
    const auto a = naive_greedy(*obj, pool, 4);
    const auto b = lazy_greedy(*obj, pool, 4);
    REQUIRE(a.chosen == b.chosen);
    REQUIRE(a.objective_value == Approx(b.objective_value).margin(1e-9));
    lazy_total += b.evaluations;
    naive_total += a.evaluations;
    REQUIRE(b.evaluations <= a.evaluations);
  }
  REQUIRE(lazy_total < naive_total);  // laziness pays on aggregate

  // Also on bound MI objectives over a joint kernel.
  for (int trial = 0; trial < 30; ++trial) {
    const embedding_matrix g_u = test_helpers::random_unit_embeddings(rng, 9, 5);
    const embedding_matrix g_q = test_helpers::random_unit_embeddings(rng, 3, 5);
    const embedding_matrix none(0, 5);
    const similarity_kernel k = assemble_joint_kernel(g_u, g_q, none, true, 0.0);
    objective_config cfg;
    cfg.ground = k.regions.unlabeled_indices();
    cfg.query = k.regions.query_indices();
    auto obj = make_objective(sim_variant::flmi, k, std::move(cfg));
    const auto a = naive_greedy(*obj, k.regions.unlabeled_indices(), 3);
    const auto b = lazy_greedy(*obj, k.regions.unlabeled_indices(), 3);
    REQUIRE(a.chosen == b.chosen);
  }
}

TEST_CASE("naive evaluation count is exactly sum of remaining pool sizes") {
  rng64 rng(56);
  const similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 15);
  auto obj = plain_fl(k);
  const auto result = naive_greedy(*obj, range_list(0, 15), 4);
  REQUIRE(result.evaluations == 15 + 14 + 13 + 12);
}

TEST_CASE("stochastic greedy sample size formula") {
  REQUIRE(stochastic_sample_size(1000, 50, 0.01) == 93);
  REQUIRE(stochastic_sample_size(12, 4, 0.05) == 9);
}

TEST_CASE("stochastic greedy is deterministic per seed") {
  rng64 rng(78);
  const similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 20);
  auto obj = plain_fl(k);
  const index_list pool = range_list(0, 20);
  const auto a = stochastic_greedy(*obj, pool, 5, 0.1, 42);
  const auto b = stochastic_greedy(*obj, pool, 5, 0.1, 42);
  REQUIRE(a.chosen == b.chosen);
  REQUIRE(a.gains == b.gains);
  const auto c = stochastic_greedy(*obj, pool, 5, 0.1, 43);
  REQUIRE(a.chosen.size() == c.chosen.size());

  REQUIRE_THROWS_AS(stochastic_greedy(*obj, pool, 5, 0.0, 1), config_error);
  REQUIRE_THROWS_AS(stochastic_greedy(*obj, pool, 5, 1.0, 1), config_error);
}

TEST_CASE("stochastic greedy stays close to the exhaustive optimum") {
  rng64 rng(90);
  double ratio_sum = 0.0;
  int runs = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 12);
    auto obj = plain_fl(k);
    const index_list pool = range_list(0, 12);
    const double opt = brute_force_opt(*obj, pool, 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto result = stochastic_greedy(*obj, pool, 4, 0.05, seed);
      ratio_sum += result.objective_value / opt;
      ++runs;
    }
  }
  REQUIRE(ratio_sum / runs >= 1.0 - std::exp(-1.0) - 0.05);
}

TEST_CASE("selection results satisfy their invariants") {
  rng64 rng(135);
  const similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 14);
  auto obj = plain_fl(k);
  const auto result = lazy_greedy(*obj, range_list(0, 14), 6);
  REQUIRE(result.chosen.size() == 6);
  index_list unique = result.chosen;
  std::sort(unique.begin(), unique.end());
  REQUIRE(std::adjacent_find(unique.begin(), unique.end()) == unique.end());
  double total = 0.0;
  for (double g : result.gains) {
    REQUIRE(g >= 0.0);  // monotone objective
    total += g;
  }
  REQUIRE(result.objective_value == Approx(total).margin(1e-7));
}

TEST_CASE("the stop-at-nonpositive flag ends a run early") {
  // Highly similar points under a small ridge: marginal log dets go negative.
  rng64 rng(146);
  embedding_matrix e(6, 4);
  const embedding_matrix base = test_helpers::random_unit_embeddings(rng, 1, 4);
  for (int r = 0; r < 6; ++r) {
    e.row(r) = base.row(0);
    e(r, 0) += 0.01 * rng.next_gaussian();
    e.row(r).normalize();
  }
  similarity_kernel k = kernel_from_matrix(cosine_similarity_matrix(e, e));
  k.data = ((k.data + k.data.transpose()) * 0.5).eval();
  k = regularize_psd(std::move(k), 0.01);

  auto obj = plain_logdet(k);
  const auto full = naive_greedy(*obj, range_list(0, 6), 6);
  REQUIRE(full.chosen.size() == 6);  // default runs to the budget
  REQUIRE(full.gains.back() < 0.0);

  greedy_options stop;
  stop.stop_at_nonpositive_gain = true;
  const auto early = naive_greedy(*obj, range_list(0, 6), 6, stop);
  REQUIRE(early.chosen.size() < 6);
  for (double g : early.gains) REQUIRE(g > 0.0);

  const auto lazy_early = lazy_greedy(*obj, range_list(0, 6), 6, stop);
  REQUIRE(lazy_early.chosen == early.chosen);
}
