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
// Statistical-significance penalty matrices. Cell (i, j) is the fraction of
// rounds in which method i beats method j with significance: per round, the
// paired per-seed accuracy differences give t = mean / stderr, compared with
// the two-tailed Student-t critical value at 2*seeds - 2 degrees of freedom.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "simsel/harness.hpp"

namespace simsel {

struct penalty_matrix_result {
  std::vector<std::string> methods;
  matrix values;  // entries in [0, 1], zero diagonal
  double alpha = 0.05;
  int rounds = 0;
};

inline double two_tailed_t_critical(int dof, double alpha) {
  if (dof < 1) throw config_error("two_tailed_t_critical: dof must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw config_error("two_tailed_t_critical: alpha must lie in (0, 1)");
  }
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, 1.0 - alpha / 2.0);
}

inline penalty_matrix_result penalty_matrix(const std::vector<experiment_record>& records,
                                            double alpha = 0.05) {
  // Group accuracy traces as method -> seed -> per-round accuracy.
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> traces;
  int rounds = -1;
  for (const auto& record : records) {
    if (rounds < 0) rounds = static_cast<int>(record.rounds.size());
    if (static_cast<int>(record.rounds.size()) != rounds) {
      throw data_error("penalty_matrix: records disagree on round count");
    }
    auto& per_seed = traces[record.method];
    if (per_seed.count(record.seed)) {
      throw data_error("penalty_matrix: duplicate record for method " + record.method +
                       " seed " + std::to_string(record.seed));
    }
    std::vector<double> acc;
    for (const auto& m : record.rounds) acc.push_back(m.test_accuracy);
    per_seed[record.seed] = std::move(acc);
  }
  if (rounds <= 0) throw config_error("penalty_matrix: no rounds");

  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  for (const auto& [method, per_seed] : traces) {
    methods.push_back(method);
    std::vector<std::uint64_t> s;
    for (const auto& [seed, trace] : per_seed) s.push_back(seed);
    if (s.size() < 2) {
      throw config_error("penalty_matrix: method " + method + " has fewer than 2 seeds");
    }
    if (seeds.empty()) {
      seeds = s;
    } else if (seeds != s) {
      throw data_error("penalty_matrix: methods were run with different seed sets");
    }
  }

  const int n_seeds = static_cast<int>(seeds.size());
  const double crit = two_tailed_t_critical(2 * n_seeds - 2, alpha);
  const double increment = 1.0 / static_cast<double>(rounds);

  penalty_matrix_result result;
  result.methods = methods;
  result.alpha = alpha;
  result.rounds = rounds;
  result.values = matrix::Zero(static_cast<Eigen::Index>(methods.size()),
                               static_cast<Eigen::Index>(methods.size()));

  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      const auto& trace_i = traces[methods[i]];
      const auto& trace_j = traces[methods[j]];
      for (int r = 0; r < rounds; ++r) {
        std::vector<double> diffs;
        diffs.reserve(seeds.size());
        for (std::uint64_t s : seeds) {
          diffs.push_back(trace_i.at(s)[static_cast<std::size_t>(r)] -
                          trace_j.at(s)[static_cast<std::size_t>(r)]);
        }
        double mean = 0.0;
        for (double d : diffs) mean += d;
        mean /= static_cast<double>(diffs.size());
        double var = 0.0;
        for (double d : diffs) var += (d - mean) * (d - mean);
        var /= static_cast<double>(diffs.size() - 1);
        const double stderr_ = std::sqrt(var / static_cast<double>(diffs.size()));

        double t;
        if (stderr_ == 0.0) {
          if (mean == 0.0) continue;  // identical traces: no increment
          t = mean > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
        } else {
          t = mean / stderr_;
        }
        if (t > crit) {
          result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              increment;
        } else if (t < -crit) {
          result.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +=
              increment;
        }
      }
    }
  }
  return result;
}

inline void write_penalty_csv(const penalty_matrix_result& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw io_error("write_penalty_csv: cannot open " + path);
  os << "method";
  for (const auto& m : result.methods) os << ',' << m;
  os << '\n';
  for (std::size_t i = 0; i < result.methods.size(); ++i) {
    os << result.methods[i];
    for (std::size_t j = 0; j < result.methods.size(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g",
                    result.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      os << ',' << buf;
    }
    os << '\n';
  }
  if (!os) throw io_error("write_penalty_csv: write failed for " + path);
}

}  // namespace simsel
