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

#pragma once

#include <algorithm>
#include <vector>

#include "simsel/kernel.hpp"
#include "simsel/rng.hpp"

namespace test_helpers {

using simsel::embedding_matrix;
using simsel::index_list;
using simsel::matrix;
using simsel::rng64;
using simsel::similarity_kernel;

inline embedding_matrix random_unit_embeddings(rng64& rng, int n, int d) {
  embedding_matrix m(n, d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = rng.next_gaussian();
    m.row(r).normalize();
  }
  return m;
}

// Rescaled cosine kernel of random unit embeddings: entries in [0, 1].
inline similarity_kernel random_rescaled_kernel(rng64& rng, int n, int d = 6) {
  const embedding_matrix e = random_unit_embeddings(rng, n, d);
  similarity_kernel k = simsel::kernel_from_matrix(simsel::cosine_similarity_matrix(e, e));
  k.data = ((k.data + k.data.transpose()) * 0.5).eval();
  return simsel::rescale_nonnegative(std::move(k));
}

// Raw cosine kernel plus a diagonal ridge: positive definite.
inline similarity_kernel random_pd_kernel(rng64& rng, int n, double ridge, int d = 6) {
  const embedding_matrix e = random_unit_embeddings(rng, n, d);
  similarity_kernel k = simsel::kernel_from_matrix(simsel::cosine_similarity_matrix(e, e));
  k.data = ((k.data + k.data.transpose()) * 0.5).eval();
  return simsel::regularize_psd(std::move(k), ridge);
}

// Uniform random subset of `pool` with size in [min_k, max_k].
inline index_list random_subset(rng64& rng, const index_list& pool, int min_k, int max_k) {
  const int k = min_k + static_cast<int>(rng.next_below(
                            static_cast<std::size_t>(max_k - min_k + 1)));
  index_list out = rng.sample_without_replacement(pool, static_cast<std::size_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

inline index_list range_list(int lo, int hi) {
  index_list out;
  for (int i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

}  // namespace test_helpers
