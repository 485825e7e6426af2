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
// Synthetic Gaussian OOD scenarios. In-distribution classes are unit-variance
// clusters whose means sit on a scaled coordinate simplex (coordinate 0 is
// reserved); the OOD population depends on the kind:
//   A  remote clusters offset by `separation` along coordinate 0, so every
//      OOD cluster mean is at least `separation` away from every ID mean
//   B  ID samples corrupted by heavy additive noise (sd = separation) and
//      random coordinate masking
//   C  clusters around the ID means pushed through a fixed random rotation
//   D  the ID cluster layout translated by a domain-shift vector of norm
//      `separation`
// Features are quantized to single precision so the CSV and the binary
// companion describe identical values.

#pragma once

#include <string>

#include "simsel/dataset.hpp"
#include "simsel/rng.hpp"

namespace simsel {

enum class scenario_kind { a, b, c, d };

inline const char* to_string(scenario_kind k) {
  switch (k) {
    case scenario_kind::a: return "A";
    case scenario_kind::b: return "B";
    case scenario_kind::c: return "C";
    case scenario_kind::d: return "D";
  }
  return "?";
}

inline scenario_kind scenario_kind_from_string(const std::string& s) {
  if (s == "A" || s == "a") return scenario_kind::a;
  if (s == "B" || s == "b") return scenario_kind::b;
  if (s == "C" || s == "c") return scenario_kind::c;
  if (s == "D" || s == "d") return scenario_kind::d;
  throw config_error("unknown scenario kind: " + s);
}

struct scenario_sizes {
  int labeled = 140;
  int unlabeled_id = 1061;
  int unlabeled_ood = 5000;
  int test = 1000;
};

struct scenario_config {
  scenario_kind kind = scenario_kind::a;
  int n_id_classes = 7;
  int dim = 8;
  scenario_sizes sizes;
  double separation = 10.0;
  double class_spread = 3.0;  // scale of the ID class simplex
  std::uint64_t seed = 0;
};

// Construction parameters exposed for verification.
struct scenario_description {
  matrix id_means;   // n_id_classes x dim
  matrix ood_means;  // cluster means (empty for kind B)
};

namespace detail {

inline matrix random_rotation(int dim, rng64& rng) {
  matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = rng.next_gaussian();
  }
  Eigen::HouseholderQR<matrix> qr(g);
  matrix q = qr.householderQ();
  const matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  }
  return q;
}

inline vector gaussian_vector(int dim, rng64& rng) {
  vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.next_gaussian();
  return v;
}

inline void quantize_to_float(matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<double>(static_cast<float>(m.data()[i]));
  }
}

}  // namespace detail

inline dataset gen_scenario(const scenario_config& cfg,
                            scenario_description* desc = nullptr) {
  if (cfg.n_id_classes < 1) throw config_error("gen_scenario: need at least one ID class");
  if (cfg.dim < cfg.n_id_classes + 1) {
    throw config_error("gen_scenario: dim must be at least n_id_classes + 1 (coordinate 0 "
                       "is reserved for the OOD offset)");
  }
  if (cfg.sizes.labeled < 1 || cfg.sizes.test < 1 || cfg.sizes.unlabeled_id < 0 ||
      cfg.sizes.unlabeled_ood < 0) {
    throw config_error("gen_scenario: sizes must be positive");
  }
  if (cfg.separation < 0.0) throw config_error("gen_scenario: separation must be >= 0");

  rng64 rng(cfg.seed);
  const int n = cfg.n_id_classes;
  const int d = cfg.dim;

  matrix id_means = matrix::Zero(n, d);
  for (int c = 0; c < n; ++c) id_means(c, 1 + c) = cfg.class_spread;

  matrix ood_means(0, d);
  switch (cfg.kind) {
    case scenario_kind::a: {
      ood_means = matrix::Zero(n, d);
      for (int c = 0; c < n; ++c) {
        ood_means(c, 0) = cfg.separation;
        for (int k = 1; k < d; ++k) {
          ood_means(c, k) = cfg.class_spread * rng.next_gaussian();
        }
      }
      break;
    }
    case scenario_kind::b:
      break;  // corruption-based, no cluster means
    case scenario_kind::c: {
      const matrix rot = detail::random_rotation(d, rng);
      ood_means = id_means * rot.transpose();
      break;
    }
    case scenario_kind::d: {
      vector shift = detail::gaussian_vector(d, rng);
      shift *= cfg.separation / std::max(shift.norm(), 1e-12);
      ood_means = id_means;
      ood_means.rowwise() += shift.transpose();
      break;
    }
  }

  const int total = cfg.sizes.labeled + cfg.sizes.unlabeled_id + cfg.sizes.unlabeled_ood +
                    cfg.sizes.test;
  dataset ds;
  ds.features = matrix(total, d);
  ds.ids.resize(static_cast<std::size_t>(total));
  ds.labels.resize(static_cast<std::size_t>(total));
  ds.split.resize(static_cast<std::size_t>(total));
  ds.is_ood.resize(static_cast<std::size_t>(total));

  int at = 0;
  const auto emit_id_row = [&](split_kind sp, int class_idx) {
    ds.features.row(at) =
        id_means.row(class_idx) + detail::gaussian_vector(d, rng).transpose();
    ds.labels[static_cast<std::size_t>(at)] = class_idx;
    ds.split[static_cast<std::size_t>(at)] = sp;
    ds.is_ood[static_cast<std::size_t>(at)] = 0;
    ++at;
  };
  const auto emit_ood_row = [&](int cluster_idx) {
    vector x;
    if (cfg.kind == scenario_kind::b) {
      const int c = cluster_idx % n;
      x = id_means.row(c).transpose() + detail::gaussian_vector(d, rng);
      x += cfg.separation * detail::gaussian_vector(d, rng);
      for (int k = 0; k < d; ++k) {
        if (rng.next_canonical() < 0.5) x[k] = 0.0;  // coordinate masking
      }
    } else {
      const int c = cluster_idx % static_cast<int>(ood_means.rows());
      x = ood_means.row(c).transpose() + detail::gaussian_vector(d, rng);
    }
    ds.features.row(at) = x.transpose();
    ds.labels[static_cast<std::size_t>(at)] = n;  // the single grouped OOD class
    ds.split[static_cast<std::size_t>(at)] = split_kind::unlabeled;
    ds.is_ood[static_cast<std::size_t>(at)] = 1;
    ++at;
  };

  // Stratified initial labeled pool (ID only), round-robin over classes.
  for (int i = 0; i < cfg.sizes.labeled; ++i) emit_id_row(split_kind::labeled, i % n);

  // Unlabeled pool: ID and OOD rows interleaved by a seeded shuffle so row
  // order does not encode the hidden flag.
  std::vector<char> pool;
  pool.reserve(static_cast<std::size_t>(cfg.sizes.unlabeled_id + cfg.sizes.unlabeled_ood));
  pool.insert(pool.end(), static_cast<std::size_t>(cfg.sizes.unlabeled_id), 0);
  pool.insert(pool.end(), static_cast<std::size_t>(cfg.sizes.unlabeled_ood), 1);
  rng.shuffle(pool);
  int next_id_class = 0;
  int next_ood_cluster = 0;
  for (char flag : pool) {
    if (flag) {
      emit_ood_row(next_ood_cluster++);
    } else {
      emit_id_row(split_kind::unlabeled, next_id_class++ % n);
    }
  }

  for (int i = 0; i < cfg.sizes.test; ++i) emit_id_row(split_kind::test, i % n);

  for (int i = 0; i < total; ++i) ds.ids[static_cast<std::size_t>(i)] = i;
  detail::quantize_to_float(ds.features);

  if (desc) {
    desc->id_means = id_means;
    desc->ood_means = ood_means;
  }
  return ds;
}

}  // namespace simsel
