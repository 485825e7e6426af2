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
// Submodular information measures over a joint similarity kernel.
//
// Generic set-arithmetic definitions (the oracle for every closed form):
//   SMI   I_f(A; Q)     = f(A) + f(Q) - f(A u Q)
//   SCG   f(A | P)      = f(A u P) - f(P)
//   SCMI  I_f(A; Q | P) = f(A u P) + f(Q u P) - f(A u Q u P) - f(P)
//
// Closed forms bound to a kernel with query set Q and private set P:
//   FLMI       sum_i min(max_{j in A} S_ij, max_{j in Q} S_ij)
//   FLCG       sum_i max(max_{j in A} S_ij - max_{j in P} S_ij, 0)
//   FLCMI      sum_i max(min(max_A S_ij, max_Q S_ij) - max_P S_ij, 0)
//   LogDetMI   log det(S_A) - log det(S_A - S_AQ S_Q^-1 S_QA)
//   LogDetCG   log det(S_A - S_AP S_P^-1 S_PA)
//   LogDetCMI  log det(S_P - S_PQ S_Q^-1 S_QP) - log det(S_P)
//              - log det(S_AP - S_APQ S_Q^-1 S_QAP) + log det(S_AP)
// (the LogDetCMI line is the ratio-of-determinants form rewritten through
// det(I - X^-1 Y) = det(X - Y)/det(X) so every factorization stays SPD).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>

#include "simsel/facility_location.hpp"
#include "simsel/log_det.hpp"

namespace simsel {

// ---------------------------------------------------------------------------
// Generic oracles.

enum class base_function { facility_location, log_det };

inline double base_eval(base_function f, const similarity_kernel& s,
                        std::span<const int> ground, std::span<const int> x) {
  switch (f) {
    case base_function::facility_location:
      return fl_eval(s, ground, x);
    case base_function::log_det:
      return logdet_eval(s, x, 0.0);
  }
  throw config_error("base_eval: unknown base function");
}

namespace detail {

inline index_list union_sorted(std::initializer_list<std::span<const int>> parts) {
  index_list out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

inline double generic_smi(base_function f, const similarity_kernel& s,
                          std::span<const int> ground, std::span<const int> a,
                          std::span<const int> q) {
  const index_list aq = detail::union_sorted({a, q});
  return base_eval(f, s, ground, a) + base_eval(f, s, ground, q) -
         base_eval(f, s, ground, aq);
}

inline double generic_scg(base_function f, const similarity_kernel& s,
                          std::span<const int> ground, std::span<const int> a,
                          std::span<const int> p) {
  const index_list ap = detail::union_sorted({a, p});
  return base_eval(f, s, ground, ap) - base_eval(f, s, ground, p);
}

inline double generic_scmi(base_function f, const similarity_kernel& s,
                           std::span<const int> ground, std::span<const int> a,
                           std::span<const int> q, std::span<const int> p) {
  const index_list ap = detail::union_sorted({a, p});
  const index_list qp = detail::union_sorted({q, p});
  const index_list aqp = detail::union_sorted({a, q, p});
  return base_eval(f, s, ground, ap) + base_eval(f, s, ground, qp) -
         base_eval(f, s, ground, aqp) - base_eval(f, s, ground, p);
}

// ---------------------------------------------------------------------------
// Bound objectives.

enum class sim_variant { flmi, logdetmi, flcg, logdetcg, flcmi, logdetcmi };

inline bool is_fl(sim_variant v) {
  return v == sim_variant::flmi || v == sim_variant::flcg || v == sim_variant::flcmi;
}
inline bool is_logdet(sim_variant v) { return !is_fl(v); }
inline bool takes_query(sim_variant v) {
  return v == sim_variant::flmi || v == sim_variant::logdetmi ||
         v == sim_variant::flcmi || v == sim_variant::logdetcmi;
}
inline bool takes_private(sim_variant v) {
  return v == sim_variant::flcg || v == sim_variant::logdetcg ||
         v == sim_variant::flcmi || v == sim_variant::logdetcmi;
}

inline const char* to_string(sim_variant v) {
  switch (v) {
    case sim_variant::flmi: return "flmi";
    case sim_variant::logdetmi: return "logdetmi";
    case sim_variant::flcg: return "flcg";
    case sim_variant::logdetcg: return "logdetcg";
    case sim_variant::flcmi: return "flcmi";
    case sim_variant::logdetcmi: return "logdetcmi";
  }
  return "?";
}

inline sim_variant sim_variant_from_string(const std::string& name) {
  for (sim_variant v : {sim_variant::flmi, sim_variant::logdetmi, sim_variant::flcg,
                        sim_variant::logdetcg, sim_variant::flcmi, sim_variant::logdetcmi}) {
    if (name == to_string(v)) return v;
  }
  throw config_error("unknown objective variant: " + name);
}

struct objective_config {
  index_list ground;  // candidate pool the selection A is drawn from
  index_list query;   // Q (ignored by CG variants, which reject it)
  index_list priv;    // P (ignored by MI variants, which reject it)
  double eta = 1.0;   // query-relevance magnification on the Q cross block
};

// Interface contract: evaluate() is a stateless closed form over any A from
// the ground set; gain()/commit() run against the internal committed set and
// satisfy gain(j) == evaluate(selected u {j}) - evaluate(selected). gain() is
// const and safe to call concurrently between commits.
class acquisition_objective {
 public:
  virtual ~acquisition_objective() = default;

  virtual double evaluate(std::span<const int> a) const = 0;
  virtual double gain(int j) const = 0;
  virtual void commit(int j) = 0;
  virtual void reset() = 0;

  sim_variant variant() const { return variant_; }
  const index_list& ground() const { return config_.ground; }
  const index_list& query() const { return config_.query; }
  const index_list& priv() const { return config_.priv; }
  const index_list& selected() const { return selected_; }

 protected:
  acquisition_objective(sim_variant v, const similarity_kernel& kernel,
                        objective_config config)
      : variant_(v), kernel_(&kernel), config_(std::move(config)) {
    if (kernel.size() == 0) {
      throw config_error(std::string(to_string(v)) + ": empty kernel");
    }
    if (!(config_.eta >= 0.0)) {
      throw config_error("eta must be nonnegative");
    }
    validate_set(config_.ground, "ground");
    validate_set(config_.query, "query");
    validate_set(config_.priv, "private");
    if (!takes_query(v) && !config_.query.empty()) {
      throw config_error(std::string(to_string(v)) + " takes no query set");
    }
    if (!takes_private(v) && !config_.priv.empty()) {
      throw config_error(std::string(to_string(v)) + " takes no private set");
    }
    for (int q : config_.query) {
      if (std::find(config_.priv.begin(), config_.priv.end(), q) != config_.priv.end()) {
        throw config_error("query and private sets overlap at index " + std::to_string(q));
      }
    }
    ground_set_.insert(config_.ground.begin(), config_.ground.end());
  }

  void check_ground_element(int j) const {
    if (!ground_set_.count(j)) {
      throw data_error(std::string(to_string(variant_)) + ": index " + std::to_string(j) +
                       " is not in the ground (unlabeled) set");
    }
  }

  void check_not_selected(int j) const {
    if (std::find(selected_.begin(), selected_.end(), j) != selected_.end()) {
      throw std::logic_error(std::string(to_string(variant_)) + ": element " +
                             std::to_string(j) + " already committed");
    }
  }

  // Sorted-unique copy restricted to the ground set (set semantics for A).
  index_list normalize_subset(std::span<const int> a) const {
    index_list out(a.begin(), a.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int j : out) check_ground_element(j);
    return out;
  }

  void validate_set(const index_list& idx, const char* what) const {
    detail::check_kernel_indices(*kernel_, idx, what);
    std::unordered_set<int> seen;
    for (int i : idx) {
      if (!seen.insert(i).second) {
        throw data_error(std::string(what) + " set contains duplicate index " +
                         std::to_string(i));
      }
    }
  }

  sim_variant variant_;
  const similarity_kernel* kernel_;
  objective_config config_;
  index_list selected_;
  std::unordered_set<int> ground_set_;
};

// ---------------------------------------------------------------------------
// Facility-location family. One implementation covers MI/CG/CMI through a
// per-ground-element cap and floor:
//   term_i(a) = max(min(a, qcap_i) - pfloor_i, 0)
// with qcap = eta * Q-max (MI/CMI; 0 when Q is empty) or +inf (CG), and
// pfloor = P-max (CG/CMI; 0 when P is empty) or 0 (MI).
class fl_sim_objective final : public acquisition_objective {
 public:
  fl_sim_objective(sim_variant v, const similarity_kernel& kernel, objective_config config)
      : acquisition_objective(v, kernel, std::move(config)) {
    if (!kernel.nonnegative()) {
      throw config_error(std::string(to_string(v)) +
                         ": facility-location objectives require a nonnegative kernel; "
                         "apply rescale_nonnegative first");
    }
    const auto n = static_cast<Eigen::Index>(config_.ground.size());
    qcap_ = vector::Zero(n);
    pfloor_ = vector::Zero(n);
    if (takes_query(variant_)) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double m = 0.0;
        for (int q : config_.query) m = std::max(m, kernel_->data(config_.ground[i], q));
        qcap_[i] = config_.eta * m;
      }
    } else {
      qcap_.setConstant(std::numeric_limits<double>::infinity());
    }
    if (takes_private(variant_)) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double m = 0.0;
        for (int p : config_.priv) m = std::max(m, kernel_->data(config_.ground[i], p));
        pfloor_[i] = m;
      }
    }
    amax_ = vector::Zero(n);
  }

  double evaluate(std::span<const int> a) const override {
    const index_list set = normalize_subset(a);
    double total = 0.0;
    for (std::size_t i = 0; i < config_.ground.size(); ++i) {
      double am = 0.0;
      for (int j : set) am = std::max(am, kernel_->data(config_.ground[i], j));
      total += term(am, static_cast<Eigen::Index>(i));
    }
    return total;
  }

  double gain(int j) const override {
    check_ground_element(j);
    check_not_selected(j);
    double g = 0.0;
    for (std::size_t i = 0; i < config_.ground.size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      const double s = kernel_->data(config_.ground[i], j);
      if (s <= amax_[e]) continue;  // running max unchanged, term unchanged
      g += term(s, e) - term(amax_[e], e);
    }
    return g;
  }

  void commit(int j) override {
    check_ground_element(j);
    check_not_selected(j);
    for (std::size_t i = 0; i < config_.ground.size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      amax_[e] = std::max(amax_[e], kernel_->data(config_.ground[i], j));
    }
    selected_.push_back(j);
  }

  void reset() override {
    amax_.setZero();
    selected_.clear();
  }

 private:
  double term(double a, Eigen::Index i) const {
    return std::max(std::min(a, qcap_[i]) - pfloor_[i], 0.0);
  }

  vector qcap_;
  vector pfloor_;
  vector amax_;
};

// ---------------------------------------------------------------------------
// Log-determinant family. Incremental gains come from one or two growing
// Cholesky factors ("joint factors"):
//   MI   gain = d f(. | A) - d f(. | A u Q)
//   CG   gain = d f(. | A u P)
//   CMI  gain = d f(. | A u P) - d f(. | A u Q u P)
// which telescopes to the set-arithmetic definitions. The A set must be
// disjoint from Q and P (overlap makes the Schur complements singular).
class logdet_sim_objective final : public acquisition_objective {
 public:
  logdet_sim_objective(sim_variant v, const similarity_kernel& kernel,
                       objective_config config)
      : acquisition_objective(v, kernel, std::move(config)) {
    for (int g : config_.ground) {
      if (ground_overlaps(g, config_.query) || ground_overlaps(g, config_.priv)) {
        throw config_error(std::string(to_string(variant_)) +
                           ": ground set must be disjoint from query/private sets");
      }
    }
    if (config_.eta != 1.0) {
      scaled_ = std::make_unique<similarity_kernel>(*kernel_);
      std::unordered_set<int> in_q(config_.query.begin(), config_.query.end());
      for (int q : config_.query) {
        for (int i = 0; i < scaled_->size(); ++i) {
          if (in_q.count(i)) continue;  // leave the Q-Q block alone
          scaled_->data(i, q) *= config_.eta;
          scaled_->data(q, i) *= config_.eta;
        }
      }
      active_ = scaled_.get();
    } else {
      active_ = kernel_;
    }

    const std::span<const int> q(config_.query);
    const std::span<const int> p(config_.priv);
    if (takes_query(variant_) && !config_.query.empty()) {
      llt_q_.compute(detail::gather(active_->data, q, q));
      if (llt_q_.info() != Eigen::Success) {
        throw numeric_error(std::string(to_string(variant_)) +
                            ": query submatrix S_Q is not positive definite");
      }
    }
    if (variant_ == sim_variant::logdetcg && !config_.priv.empty()) {
      llt_p_.compute(detail::gather(active_->data, p, p));
      if (llt_p_.info() != Eigen::Success) {
        throw numeric_error("logdetcg: private submatrix S_P is not positive definite");
      }
    }
    if (variant_ == sim_variant::logdetcmi && !config_.priv.empty() &&
        !config_.query.empty()) {
      // Sorted so evaluate({}) reproduces this computation bit for bit.
      index_list p_sorted = config_.priv;
      std::sort(p_sorted.begin(), p_sorted.end());
      cmi_const_ = conditioned_logdet_minus_logdet(p_sorted);
    }

    // State 1 tracks f over [pre1 | A], state 2 over [pre2 | A].
    index_list pre1;
    index_list pre2;
    bool has2 = false;
    switch (variant_) {
      case sim_variant::logdetmi:
        pre2 = config_.query;
        has2 = true;
        break;
      case sim_variant::logdetcg:
        pre1 = config_.priv;
        break;
      case sim_variant::logdetcmi:
        pre1 = config_.priv;
        pre2 = config_.priv;
        pre2.insert(pre2.end(), config_.query.begin(), config_.query.end());
        has2 = true;
        break;
      default:
        throw config_error("logdet_sim_objective: facility-location variant");
    }
    has_state2_ = has2;
    pristine1_ = build_state(pre1);
    if (has_state2_) pristine2_ = build_state(pre2);
    reset();
  }

  double evaluate(std::span<const int> a) const override {
    const index_list set = normalize_subset(a);
    switch (variant_) {
      case sim_variant::logdetmi:
        return eval_mi(set);
      case sim_variant::logdetcg:
        return eval_cg(set);
      case sim_variant::logdetcmi:
        if (config_.priv.empty()) return eval_mi(set);
        if (config_.query.empty()) return 0.0;
        return cmi_const_ - conditioned_logdet_minus_logdet(
                                detail::union_sorted({std::span<const int>(set),
                                                      std::span<const int>(config_.priv)}));
      default:
        throw config_error("unreachable");
    }
  }

  double gain(int j) const override {
    check_ground_element(j);
    check_not_selected(j);
    const double g1 = state1_->gain(j);
    if (std::isinf(g1)) return -std::numeric_limits<double>::infinity();
    if (!has_state2_) return g1;
    return g1 - state2_->gain(j);
  }

  void commit(int j) override {
    check_ground_element(j);
    check_not_selected(j);
    if (!std::isfinite(gain(j))) {
      throw numeric_error(std::string(to_string(variant_)) + ": gain at element " +
                          std::to_string(j) +
                          " is not finite; increase the ridge");
    }
    state1_->commit(j);
    if (has_state2_) state2_->commit(j);
    selected_.push_back(j);
  }

  void reset() override {
    state1_ = std::make_shared<log_det_state>(*pristine1_);
    if (has_state2_) state2_ = std::make_shared<log_det_state>(*pristine2_);
    selected_.clear();
  }

 private:
  static bool ground_overlaps(int g, const index_list& set) {
    return std::find(set.begin(), set.end(), g) != set.end();
  }

  std::shared_ptr<log_det_state> build_state(const index_list& pre) const {
    auto st = std::make_shared<log_det_state>(*active_, 0.0);
    for (int j : pre) st->commit(j);
    return st;
  }

  // log det(S_A) - log det(S_A - S_AQ S_Q^-1 S_QA); 0 when A or Q is empty.
  double eval_mi(const index_list& set) const {
    if (set.empty() || config_.query.empty()) return 0.0;
    const std::span<const int> a(set);
    const std::span<const int> q(config_.query);
    const matrix s_a = detail::gather(active_->data, a, a);
    const matrix cross = detail::gather(active_->data, a, q);
    const matrix deflated = s_a - cross * llt_q_.solve(cross.transpose());
    return detail::logdet_spd(s_a, "logdetmi") -
           detail::logdet_spd(deflated, "logdetmi");
  }

  // log det(S_A - S_AP S_P^-1 S_PA); reduces to log det(S_A) when P is empty.
  double eval_cg(const index_list& set) const {
    if (set.empty()) return 0.0;
    const std::span<const int> a(set);
    const matrix s_a = detail::gather(active_->data, a, a);
    if (config_.priv.empty()) return detail::logdet_spd(s_a, "logdetcg");
    const std::span<const int> p(config_.priv);
    const matrix cross = detail::gather(active_->data, a, p);
    const matrix deflated = s_a - cross * llt_p_.solve(cross.transpose());
    return detail::logdet_spd(deflated, "logdetcg");
  }

  // log det(S_X - S_XQ S_Q^-1 S_QX) - log det(S_X) for X given sorted.
  double conditioned_logdet_minus_logdet(const index_list& x) const {
    if (x.empty()) return 0.0;
    const std::span<const int> xs(x);
    const std::span<const int> q(config_.query);
    const matrix s_x = detail::gather(active_->data, xs, xs);
    const matrix cross = detail::gather(active_->data, xs, q);
    const matrix deflated = s_x - cross * llt_q_.solve(cross.transpose());
    return detail::logdet_spd(deflated, "logdetcmi") -
           detail::logdet_spd(s_x, "logdetcmi");
  }

  std::unique_ptr<similarity_kernel> scaled_;
  const similarity_kernel* active_ = nullptr;
  Eigen::LLT<matrix> llt_q_;
  Eigen::LLT<matrix> llt_p_;
  double cmi_const_ = 0.0;
  bool has_state2_ = false;
  std::shared_ptr<log_det_state> pristine1_;
  std::shared_ptr<log_det_state> pristine2_;
  std::shared_ptr<log_det_state> state1_;
  std::shared_ptr<log_det_state> state2_;
};

inline std::unique_ptr<acquisition_objective> make_objective(
    sim_variant v, const similarity_kernel& kernel, objective_config config) {
  if (is_fl(v)) return std::make_unique<fl_sim_objective>(v, kernel, std::move(config));
  return std::make_unique<logdet_sim_objective>(v, kernel, std::move(config));
}

}  // namespace simsel
