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
// Budget-constrained greedy maximizers. All three variants break ties by
// lowest candidate index, so naive and lazy produce identical selections on
// submodular objectives and a seeded stochastic run is reproducible.

#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <span>
#include <unordered_set>
#include <vector>

#include "simsel/rng.hpp"
#include "simsel/sim_functions.hpp"

namespace simsel {

struct selection_result {
  index_list chosen;           // in selection order
  std::vector<double> gains;   // marginal gain of each step
  double objective_value = 0;  // sum of gains
  long evaluations = 0;        // number of gain queries issued
};

struct greedy_options {
  // Stop at the first step whose best marginal gain is <= 0 instead of
  // running to the budget (useful for the non-monotone LogDet family).
  bool stop_at_nonpositive_gain = false;
};

namespace detail {

inline index_list checked_candidates(std::span<const int> candidates, int budget,
                                     const char* who) {
  if (budget < 0) throw config_error(std::string(who) + ": budget must be >= 0");
  if (budget > 0 && candidates.empty()) {
    throw config_error(std::string(who) + ": no candidates for a positive budget");
  }
  index_list sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw data_error(std::string(who) + ": duplicate candidate index");
  }
  if (budget > static_cast<int>(sorted.size())) {
    std::cerr << who << ": budget " << budget << " exceeds " << sorted.size()
              << " candidates; selecting all of them\n";
  }
  return sorted;
}

inline void push_step(selection_result& result, int j, double gain) {
  result.chosen.push_back(j);
  result.gains.push_back(gain);
  result.objective_value += gain;
}

}  // namespace detail

inline selection_result naive_greedy(acquisition_objective& objective,
                                     std::span<const int> candidates, int budget,
                                     greedy_options options = {}) {
  index_list remaining = detail::checked_candidates(candidates, budget, "naive_greedy");
  objective.reset();
  selection_result result;
  const int steps = std::min<int>(budget, static_cast<int>(remaining.size()));
  for (int step = 0; step < steps; ++step) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best_at = remaining.size();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const double g = objective.gain(remaining[i]);
      ++result.evaluations;
      if (g > best_gain) {  // strict: first (lowest) index wins ties
        best_gain = g;
        best_at = i;
      }
    }
    if (std::isinf(best_gain) && best_gain < 0) {
      throw numeric_error("naive_greedy: every remaining candidate is numerically "
                          "dependent; increase the ridge");
    }
    if (options.stop_at_nonpositive_gain && best_gain <= 0.0) break;
    const int j = remaining[best_at];
    objective.commit(j);
    detail::push_step(result, j, best_gain);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_at));
  }
  return result;
}

// Lazy (priority-queue) greedy: stale upper bounds are refreshed only when
// they surface, which preserves naive's selections on submodular objectives.
inline selection_result lazy_greedy(acquisition_objective& objective,
                                    std::span<const int> candidates, int budget,
                                    greedy_options options = {}) {
  index_list sorted = detail::checked_candidates(candidates, budget, "lazy_greedy");
  objective.reset();
  selection_result result;

  struct entry {
    double bound;
    int index;
    int stamp;  // number of commits when the bound was computed
  };
  struct order {
    bool operator()(const entry& a, const entry& b) const {
      if (a.bound != b.bound) return a.bound < b.bound;
      return a.index > b.index;  // lower index surfaces first on equal bounds
    }
  };
  std::priority_queue<entry, std::vector<entry>, order> heap;
  for (int j : sorted) {
    heap.push({std::numeric_limits<double>::infinity(), j, -1});
  }

  const int steps = std::min<int>(budget, static_cast<int>(sorted.size()));
  int commits = 0;
  while (commits < steps && !heap.empty()) {
    entry top = heap.top();
    heap.pop();
    if (top.stamp != commits) {
      top.bound = objective.gain(top.index);
      ++result.evaluations;
      top.stamp = commits;
      heap.push(top);
      continue;
    }
    if (std::isinf(top.bound) && top.bound < 0) {
      throw numeric_error("lazy_greedy: every remaining candidate is numerically "
                          "dependent; increase the ridge");
    }
    if (options.stop_at_nonpositive_gain && top.bound <= 0.0) break;
    objective.commit(top.index);
    detail::push_step(result, top.index, top.bound);
    ++commits;
  }
  return result;
}

// Per-step sample size ceil((n/B) ln(1/eps)) of the stochastic greedy.
inline int stochastic_sample_size(int n, int budget, double epsilon) {
  if (budget <= 0) return 0;
  const double raw = (static_cast<double>(n) / budget) * std::log(1.0 / epsilon);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

inline selection_result stochastic_greedy(acquisition_objective& objective,
                                          std::span<const int> candidates, int budget,
                                          double epsilon, std::uint64_t seed,
                                          greedy_options options = {}) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw config_error("stochastic_greedy: epsilon must lie in (0, 1)");
  }
  index_list remaining = detail::checked_candidates(candidates, budget, "stochastic_greedy");
  objective.reset();
  selection_result result;
  rng64 rng(seed);

  const int n0 = static_cast<int>(remaining.size());
  const int per_step = stochastic_sample_size(n0, budget, epsilon);
  const int steps = std::min<int>(budget, n0);
  for (int step = 0; step < steps; ++step) {
    const int sample_size = std::min<int>(per_step, static_cast<int>(remaining.size()));
    index_list sample = rng.sample_without_replacement(remaining,
                                                       static_cast<std::size_t>(sample_size));
    std::sort(sample.begin(), sample.end());
    double best_gain = -std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (int j : sample) {
      const double g = objective.gain(j);
      ++result.evaluations;
      if (g > best_gain) {
        best_gain = g;
        best_j = j;
      }
    }
    if (std::isinf(best_gain) && best_gain < 0) {
      throw numeric_error("stochastic_greedy: sampled candidates are all numerically "
                          "dependent; increase the ridge");
    }
    if (options.stop_at_nonpositive_gain && best_gain <= 0.0) break;
    objective.commit(best_j);
    detail::push_step(result, best_j, best_gain);
    remaining.erase(std::lower_bound(remaining.begin(), remaining.end(), best_j));
  }
  return result;
}

}  // namespace simsel
