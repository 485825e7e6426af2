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
// Log-determinant of the selected principal submatrix, f(A) = log det(S_A + eps I).
// The state grows a Cholesky factor one row per commit, so a marginal gain is
// one triangular solve: gain(j) = log(S_jj + eps - |w|^2) with L w = S_{A,j}.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Cholesky>

#include "simsel/kernel.hpp"

namespace simsel {

// Schur complements at or below this floor are treated as numerically
// dependent; gains report -inf and commits refuse to extend the factor.
inline constexpr double kSchurFloor = 1e-12;

namespace detail {

inline matrix gather(const matrix& s, std::span<const int> rows,
                     std::span<const int> cols) {
  matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s(rows[r], cols[c]);
    }
  }
  return out;
}

// log det of a symmetric positive definite matrix via LLT.
inline double logdet_spd(const matrix& m, const char* what) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw numeric_error(std::string(what) +
                        ": matrix is not positive definite; increase the ridge");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

inline double logdet_eval(const similarity_kernel& s, std::span<const int> a, double eps) {
  detail::check_kernel_indices(s, index_list(a.begin(), a.end()), "logdet_eval(A)");
  if (a.empty()) return 0.0;
  matrix sub = detail::gather(s.data, a, a);
  sub.diagonal().array() += eps;
  return detail::logdet_spd(sub, "logdet_eval");
}

class log_det_state {
 public:
  log_det_state(const similarity_kernel& s, double eps) : kernel_(&s), eps_(eps) {}

  double gain(int j) const {
    check_candidate(j);
    const double schur = schur_complement(j);
    if (schur <= kSchurFloor) return -std::numeric_limits<double>::infinity();
    return std::log(schur);
  }

  void commit(int j) {
    check_candidate(j);
    const int k = static_cast<int>(selected_.size());
    if (factor_.rows() <= k) {
      const Eigen::Index cap = std::max<Eigen::Index>(8, 2 * factor_.rows());
      factor_.conservativeResize(cap, cap);
    }
    vector w(k);
    const double schur = schur_complement(j, &w);
    if (schur <= kSchurFloor) {
      throw numeric_error("log_det_state: Schur complement " + std::to_string(schur) +
                          " at element " + std::to_string(j) +
                          " is not positive; increase the ridge");
    }
    factor_.row(k).head(k) = w.transpose();
    factor_(k, k) = std::sqrt(schur);
    log_det_ += std::log(schur);
    selected_.push_back(j);
  }

  double log_det() const { return log_det_; }
  const index_list& selected() const { return selected_; }

  // Valid k x k lower-triangular factor of S_A + eps I.
  matrix factor() const {
    const Eigen::Index k = static_cast<Eigen::Index>(selected_.size());
    return factor_.topLeftCorner(k, k).triangularView<Eigen::Lower>().toDenseMatrix();
  }

 private:
  void check_candidate(int j) const {
    if (j < 0 || j >= kernel_->size()) {
      throw data_error("log_det_state: index " + std::to_string(j) + " out of kernel bounds");
    }
    if (std::find(selected_.begin(), selected_.end(), j) != selected_.end()) {
      throw std::logic_error("log_det_state: element " + std::to_string(j) +
                             " already committed");
    }
  }

  // S_jj + eps - |w|^2 where L w = S_{A,j}.
  double schur_complement(int j, vector* w_out = nullptr) const {
    const int k = static_cast<int>(selected_.size());
    vector c(k);
    for (int r = 0; r < k; ++r) c[r] = kernel_->data(selected_[r], j);
    vector w = factor_.topLeftCorner(k, k)
                   .triangularView<Eigen::Lower>()
                   .solve(c);
    if (w_out) *w_out = w;
    return kernel_->data(j, j) + eps_ - w.squaredNorm();
  }

  const similarity_kernel* kernel_;
  double eps_;
  matrix factor_;
  index_list selected_;
  double log_det_ = 0.0;
};

}  // namespace simsel
