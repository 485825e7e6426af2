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
// Facility location: f(A) = sum_{i in ground} max_{j in A} S_ij, with the
// max over an empty A defined as 0 (hence the nonnegative-kernel requirement
// for the bound objectives). The state memoizes per-ground running maxima so
// a marginal gain costs O(|ground|).

#pragma once

#include <algorithm>
#include <span>
#include <string>

#include "simsel/kernel.hpp"

namespace simsel {

inline double fl_eval(const similarity_kernel& s, std::span<const int> ground,
                      std::span<const int> a) {
  detail::check_kernel_indices(s, index_list(ground.begin(), ground.end()),
                               "fl_eval(ground)");
  detail::check_kernel_indices(s, index_list(a.begin(), a.end()), "fl_eval(A)");
  double total = 0.0;
  for (int i : ground) {
    double best = 0.0;
    for (int j : a) best = std::max(best, s.data(i, j));
    total += best;
  }
  return total;
}

class facility_location_state {
 public:
  facility_location_state(const similarity_kernel& s, index_list ground)
      : kernel_(&s), ground_(std::move(ground)) {
    detail::check_kernel_indices(s, ground_, "facility_location_state");
    current_max_ = vector::Zero(static_cast<Eigen::Index>(ground_.size()));
  }

  // sum_i max(S_ij - current_max_i, 0); equals f(A u {j}) - f(A).
  double gain(int j) const {
    check_candidate(j);
    double g = 0.0;
    for (std::size_t i = 0; i < ground_.size(); ++i) {
      const double d = kernel_->data(ground_[i], j) - current_max_[static_cast<Eigen::Index>(i)];
      if (d > 0.0) g += d;
    }
    return g;
  }

  void commit(int j) {
    check_candidate(j);
    for (std::size_t i = 0; i < ground_.size(); ++i) {
      auto& m = current_max_[static_cast<Eigen::Index>(i)];
      m = std::max(m, kernel_->data(ground_[i], j));
    }
    selected_.push_back(j);
  }

  double value() const { return current_max_.sum(); }
  const index_list& selected() const { return selected_; }
  const vector& current_max() const { return current_max_; }
  const index_list& ground() const { return ground_; }

 private:
  void check_candidate(int j) const {
    if (j < 0 || j >= kernel_->size()) {
      throw data_error("facility_location_state: index " + std::to_string(j) +
                       " out of kernel bounds");
    }
    if (std::find(selected_.begin(), selected_.end(), j) != selected_.end()) {
      throw std::logic_error("facility_location_state: element " + std::to_string(j) +
                             " already committed");
    }
  }

  const similarity_kernel* kernel_;
  index_list ground_;
  vector current_max_;
  index_list selected_;
};

}  // namespace simsel
