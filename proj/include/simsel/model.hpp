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
// Linear softmax classifier over precomputed features. It supplies exactly
// what the acquisition loop consumes from a deep model: class probabilities,
// hypothesized labels, and last-layer cross-entropy gradient embeddings
// (p - onehot(y)) (x) x.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "simsel/kernel.hpp"
#include "simsel/rng.hpp"

namespace simsel {

struct train_config {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double target_train_accuracy = 0.99;
  int max_epochs = 500;
  int batch_size = 32;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0) || !(momentum >= 0.0) || !(weight_decay >= 0.0)) {
      throw config_error("train_config: rates must be positive");
    }
    if (!(target_train_accuracy > 0.0 && target_train_accuracy <= 1.0)) {
      throw config_error("train_config: target accuracy must be in (0, 1]");
    }
    if (max_epochs < 1 || batch_size < 1) {
      throw config_error("train_config: epochs and batch size must be >= 1");
    }
  }
};

struct softmax_classifier {
  matrix weights;  // C x d
  vector bias;     // C

  int classes() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }

  vector predict_proba(const vector& x) const {
    if (x.size() != weights.cols()) {
      throw data_error("predict_proba: feature dim " + std::to_string(x.size()) +
                       " does not match model dim " + std::to_string(weights.cols()));
    }
    vector logits = weights * x + bias;
    const double peak = logits.maxCoeff();
    vector p = (logits.array() - peak).exp();
    p /= p.sum();
    return p;
  }

  // N x C probability matrix for feature rows.
  matrix predict_proba_rows(const matrix& features) const {
    matrix logits = features * weights.transpose();
    logits.rowwise() += bias.transpose();
    const vector peak = logits.rowwise().maxCoeff();
    logits.colwise() -= peak;
    matrix p = logits.array().exp();
    const vector norm = p.rowwise().sum();
    p.array().colwise() /= norm.array();
    return p;
  }

  // Argmax class; ties go to the lowest class index.
  int hypothesized_label(const vector& x) const {
    const vector p = predict_proba(x);
    int best = 0;
    for (int c = 1; c < classes(); ++c) {
      if (p[c] > p[best]) best = c;
    }
    return best;
  }

  // Flattened (p - onehot(y)) (x) x, the cross-entropy gradient with respect
  // to the last-layer weights; entry c*d + k is (p_c - [c==y]) * x_k.
  vector gradient_embedding(const vector& x, int y) const {
    if (y < 0 || y >= classes()) {
      throw data_error("gradient_embedding: label " + std::to_string(y) +
                       " outside [0, " + std::to_string(classes()) + ")");
    }
    vector p = predict_proba(x);
    p[y] -= 1.0;
    vector g(static_cast<Eigen::Index>(classes()) * dim());
    for (int c = 0; c < classes(); ++c) {
      g.segment(static_cast<Eigen::Index>(c) * dim(), dim()) = p[c] * x;
    }
    return g;
  }
};

// One SGD update with classic momentum; weight decay enters the gradient.
inline void sgd_momentum_step(matrix& w, vector& b, matrix& vel_w, vector& vel_b,
                              const matrix& grad_w, const vector& grad_b, double lr,
                              double momentum, double weight_decay) {
  vel_w = momentum * vel_w + grad_w + weight_decay * w;
  vel_b = momentum * vel_b + grad_b;  // bias is not decayed
  w -= lr * vel_w;
  b -= lr * vel_b;
}

namespace detail {

inline double train_accuracy(const softmax_classifier& m, const matrix& x,
                             const std::vector<int>& y) {
  const matrix p = m.predict_proba_rows(x);
  int hits = 0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    int best = 0;
    for (int c = 1; c < p.cols(); ++c) {
      if (p(r, c) > p(r, best)) best = c;
    }
    if (best == y[static_cast<std::size_t>(r)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(p.rows());
}

}  // namespace detail

// Mini-batch SGD with momentum, weight decay, and per-epoch cosine annealing.
// Parameters are reinitialized from cfg.seed on every call (fan-based
// symmetric uniform init); training stops once the target train accuracy is
// reached or max_epochs expire.
inline softmax_classifier train(const matrix& features, const std::vector<int>& labels,
                                int num_classes, const train_config& cfg) {
  cfg.validate();
  const auto n = features.rows();
  const auto d = features.cols();
  if (n == 0) throw config_error("train: empty training set");
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw config_error("train: feature/label count mismatch");
  }
  if (num_classes < 1) throw config_error("train: need at least one class");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw config_error("train: label " + std::to_string(y) + " outside [0, " +
                         std::to_string(num_classes) + ")");
    }
  }
  if (!features.allFinite()) throw data_error("train: non-finite features");

  rng64 rng(cfg.seed);
  softmax_classifier model;
  const double limit = std::sqrt(6.0 / static_cast<double>(d + num_classes));
  model.weights = matrix::NullaryExpr(num_classes, d, [&]() {
    return (2.0 * rng.next_canonical() - 1.0) * limit;
  });
  model.bias = vector::Zero(num_classes);

  matrix vel_w = matrix::Zero(num_classes, d);
  vector vel_b = vector::Zero(num_classes);

  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = cfg.learning_rate * 0.5 *
                      (1.0 + std::cos(M_PI * epoch / cfg.max_epochs));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index m = std::min<Eigen::Index>(cfg.batch_size, n - start);
      matrix xb(m, d);
      for (Eigen::Index r = 0; r < m; ++r) {
        xb.row(r) = features.row(order[static_cast<std::size_t>(start + r)]);
      }
      matrix p = model.predict_proba_rows(xb);
      for (Eigen::Index r = 0; r < m; ++r) {
        const int y = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + r)])];
        epoch_loss -= std::log(std::max(p(r, y), 1e-300));
        p(r, y) -= 1.0;
      }
      const matrix grad_w = p.transpose() * xb / static_cast<double>(m);
      const vector grad_b = p.colwise().mean();
      sgd_momentum_step(model.weights, model.bias, vel_w, vel_b, grad_w, grad_b, lr,
                        cfg.momentum, cfg.weight_decay);
    }
    if (!std::isfinite(epoch_loss)) {
      throw numeric_error("train: loss became non-finite at epoch " +
                          std::to_string(epoch));
    }
    if (detail::train_accuracy(model, features, labels) >= cfg.target_train_accuracy) {
      break;
    }
  }
  return model;
}

}  // namespace simsel
