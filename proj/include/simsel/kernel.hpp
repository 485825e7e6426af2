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
// Pairwise cosine-similarity kernels over a joint ground set laid out as
// [unlabeled | query | private]. Facility-location style objectives consume
// the (1+s)/2 rescaled kernel; log-determinant objectives consume the raw
// cosine kernel with a diagonal ridge.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simsel/errors.hpp"

namespace simsel {

using matrix = Eigen::MatrixXd;
using vector = Eigen::VectorXd;

// Rows are items, columns are feature dimensions.
using embedding_matrix = Eigen::MatrixXd;

using index_list = std::vector<int>;

// Contiguous region layout of a joint kernel: rows/columns
// [0, unlabeled) | [unlabeled, unlabeled+query) | [.., ..+private).
struct kernel_regions {
  int unlabeled = 0;
  int query = 0;
  int priv = 0;

  int size() const { return unlabeled + query + priv; }

  index_list unlabeled_indices() const { return range(0, unlabeled); }
  index_list query_indices() const { return range(unlabeled, unlabeled + query); }
  index_list private_indices() const {
    return range(unlabeled + query, unlabeled + query + priv);
  }

 private:
  static index_list range(int lo, int hi) {
    index_list out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (int i = lo; i < hi; ++i) out.push_back(i);
    return out;
  }
};

struct similarity_kernel {
  matrix data;
  kernel_regions regions;
  bool nonneg_rescaled = false;
  double psd_ridge = 0.0;

  int size() const { return static_cast<int>(data.rows()); }
  bool nonnegative() const { return data.size() == 0 || data.minCoeff() >= 0.0; }
};

namespace detail {

inline void validate_embeddings(const embedding_matrix& m, const char* name) {
  if (m.rows() > 0 && m.cols() <= 0) {
    throw config_error(std::string(name) + ": embedding dimension must be positive");
  }
  if (!m.allFinite()) {
    throw data_error(std::string(name) + ": embeddings contain non-finite entries");
  }
}

inline Eigen::MatrixXd normalized_rows(const embedding_matrix& m, const char* name) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm == 0.0) {
      throw data_error(std::string(name) + ": row " + std::to_string(r) +
                       " has zero norm, cosine similarity is undefined");
    }
    out.row(r) /= norm;
  }
  return out;
}

inline void check_kernel_indices(const similarity_kernel& k, const index_list& idx,
                                 const char* what) {
  for (int i : idx) {
    if (i < 0 || i >= k.size()) {
      throw data_error(std::string(what) + ": index " + std::to_string(i) +
                       " out of kernel bounds [0, " + std::to_string(k.size()) + ")");
    }
  }
}

}  // namespace detail

// Entry (i, j) = <a_i, b_j> / (|a_i| |b_j|); clamped to [-1, 1] so downstream
// range invariants hold despite floating-point drift.
inline matrix cosine_similarity_matrix(const embedding_matrix& a,
                                       const embedding_matrix& b) {
  detail::validate_embeddings(a, "cosine_similarity_matrix(a)");
  detail::validate_embeddings(b, "cosine_similarity_matrix(b)");
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols()) {
    throw config_error("cosine_similarity_matrix: dimension mismatch (" +
                       std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  }
  const Eigen::MatrixXd na = detail::normalized_rows(a, "cosine_similarity_matrix(a)");
  const Eigen::MatrixXd nb = detail::normalized_rows(b, "cosine_similarity_matrix(b)");
  matrix s = na * nb.transpose();
  return s.cwiseMax(-1.0).cwiseMin(1.0);
}

// Monotone map s -> (1+s)/2 taking [-1,1] onto [0,1].
inline similarity_kernel rescale_nonnegative(similarity_kernel k) {
  if (k.data.size() > 0 && (k.data.minCoeff() < -1.0 || k.data.maxCoeff() > 1.0)) {
    throw data_error("rescale_nonnegative: entries outside [-1, 1]");
  }
  k.data = (k.data.array() + 1.0) * 0.5;
  k.nonneg_rescaled = true;
  return k;
}

inline similarity_kernel regularize_psd(similarity_kernel k, double eps) {
  if (!(eps > 0.0)) {
    throw config_error("regularize_psd: ridge must be positive");
  }
  if (k.data.size() > 0 && (k.data - k.data.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw data_error("regularize_psd: kernel is not symmetric");
  }
  k.data.diagonal().array() += eps;
  k.psd_ridge += eps;
  return k;
}

// Wraps an arbitrary square similarity matrix (tests, `select` on cached
// kernels). All rows default to the unlabeled region.
inline similarity_kernel kernel_from_matrix(matrix s, kernel_regions regions = {}) {
  if (s.rows() != s.cols()) {
    throw data_error("kernel_from_matrix: matrix must be square");
  }
  if (regions.size() == 0) {
    regions = kernel_regions{static_cast<int>(s.rows()), 0, 0};
  }
  if (regions.size() != static_cast<int>(s.rows())) {
    throw config_error("kernel_from_matrix: region sizes do not cover the matrix");
  }
  similarity_kernel k;
  k.data = std::move(s);
  k.regions = regions;
  return k;
}

// Full joint cosine kernel over [g_u | g_q | g_p] with regions tagged.
// `rescale` maps entries to [0,1]; `ridge` (if > 0) is added to the diagonal.
inline similarity_kernel assemble_joint_kernel(const embedding_matrix& g_u,
                                               const embedding_matrix& g_q,
                                               const embedding_matrix& g_p,
                                               bool rescale, double ridge) {
  const auto rows_of = [](const embedding_matrix& m) { return static_cast<int>(m.rows()); };
  const auto cols_of = [](const embedding_matrix& m) {
    return m.rows() > 0 ? static_cast<int>(m.cols()) : -1;
  };
  int dim = -1;
  for (const embedding_matrix* m : {&g_u, &g_q, &g_p}) {
    const int c = cols_of(*m);
    if (c < 0) continue;
    if (dim < 0) dim = c;
    if (c != dim) throw config_error("assemble_joint_kernel: embedding dims differ");
  }
  const int n = rows_of(g_u) + rows_of(g_q) + rows_of(g_p);
  embedding_matrix stacked(n, dim < 0 ? 0 : dim);
  int at = 0;
  for (const embedding_matrix* m : {&g_u, &g_q, &g_p}) {
    if (m->rows() > 0) stacked.middleRows(at, m->rows()) = *m;
    at += rows_of(*m);
  }

  similarity_kernel k;
  k.regions = kernel_regions{rows_of(g_u), rows_of(g_q), rows_of(g_p)};
  if (n == 0) {
    k.data = matrix(0, 0);
    return k;
  }
  matrix s = cosine_similarity_matrix(stacked, stacked);
  s = ((s + s.transpose()) * 0.5).eval();  // kill FP asymmetry from the GEMM
  k.data = s.cwiseMax(-1.0).cwiseMin(1.0);
  if (rescale) k = rescale_nonnegative(std::move(k));
  if (ridge > 0.0) k = regularize_psd(std::move(k), ridge);
  return k;
}

// ---------------------------------------------------------------------------
// Kernel cache: 16-byte header (magic "SIMK", version u32, size u32,
// flags u32), then row-major IEEE-754 single-precision little-endian entries.
// Regions and ridge are not persisted; the loader tags everything unlabeled
// and callers rebind regions when needed.

namespace detail {

constexpr std::uint32_t kKernelCacheVersion = 1;
constexpr std::uint32_t kFlagNonnegRescaled = 1u << 0;

inline void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline void save_kernel_cache(const similarity_kernel& k, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("save_kernel_cache: cannot open " + path);
  std::string header = "SIMK";
  detail::put_u32_le(header, detail::kKernelCacheVersion);
  detail::put_u32_le(header, static_cast<std::uint32_t>(k.size()));
  detail::put_u32_le(header, k.nonneg_rescaled ? detail::kFlagNonnegRescaled : 0u);
  os.write(header.data(), static_cast<std::streamsize>(header.size()));

  using row_major_f = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  row_major_f buf = k.data.cast<float>();
  static_assert(sizeof(float) == 4);
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(sizeof(float) * buf.size()));
  } else {
    std::string bytes;
    bytes.reserve(4 * static_cast<std::size_t>(buf.size()));
    for (Eigen::Index i = 0; i < buf.size(); ++i) {
      detail::put_u32_le(bytes, std::bit_cast<std::uint32_t>(buf.data()[i]));
    }
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!os) throw io_error("save_kernel_cache: write failed for " + path);
}

inline similarity_kernel load_kernel_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("load_kernel_cache: cannot open " + path);
  unsigned char header[16];
  is.read(reinterpret_cast<char*>(header), 16);
  if (!is || std::memcmp(header, "SIMK", 4) != 0) {
    throw io_error("load_kernel_cache: bad magic in " + path);
  }
  const std::uint32_t version = detail::get_u32_le(header + 4);
  if (version != detail::kKernelCacheVersion) {
    throw io_error("load_kernel_cache: unsupported version " + std::to_string(version));
  }
  const std::uint32_t n = detail::get_u32_le(header + 8);
  const std::uint32_t flags = detail::get_u32_le(header + 12);

  using row_major_f = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  row_major_f buf(n, n);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(sizeof(float) * buf.size()));
  if (!is) throw io_error("load_kernel_cache: truncated file " + path);
  if constexpr (std::endian::native != std::endian::little) {
    for (Eigen::Index i = 0; i < buf.size(); ++i) {
      std::uint32_t raw = std::bit_cast<std::uint32_t>(buf.data()[i]);
      unsigned char b[4];
      std::memcpy(b, &raw, 4);
      buf.data()[i] = std::bit_cast<float>(detail::get_u32_le(b));
    }
  }

  similarity_kernel k;
  k.data = buf.cast<double>();
  k.regions = kernel_regions{static_cast<int>(n), 0, 0};
  k.nonneg_rescaled = (flags & detail::kFlagNonnegRescaled) != 0;
  return k;
}

}  // namespace simsel
