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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "simsel/kernel.hpp"

using namespace simsel;
using Catch::Approx;

TEST_CASE("cosine similarity of hand-checked pairs") {
  embedding_matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 1, 0;
  REQUIRE(cosine_similarity_matrix(a, b)(0, 0) == Approx(1.0));
  b << 0, 1;
  REQUIRE(cosine_similarity_matrix(a, b)(0, 0) == Approx(0.0).margin(1e-15));
  a << 1, 1;
  b << 1, 0;
  REQUIRE(cosine_similarity_matrix(a, b)(0, 0) == Approx(0.70710678).epsilon(1e-8));
}

TEST_CASE("cosine similarity rejects bad inputs") {
  embedding_matrix a(1, 2), b(1, 3);
  a << 1, 0;
  b << 1, 0, 0;
  REQUIRE_THROWS_AS(cosine_similarity_matrix(a, b), config_error);

  embedding_matrix z(2, 2);
  z << 1, 0, 0, 0;
  try {
    cosine_similarity_matrix(z, z);
    FAIL("expected data_error");
  } catch (const data_error& e) {
    REQUIRE(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("cosine entries stay in [-1, 1]") {
  rng64 rng(11);
  const embedding_matrix e = test_helpers::random_unit_embeddings(rng, 40, 5);
  const matrix s = cosine_similarity_matrix(e, e);
  REQUIRE(s.minCoeff() >= -1.0);
  REQUIRE(s.maxCoeff() <= 1.0);
}

TEST_CASE("rescale_nonnegative fixed points and midpoint") {
  matrix m(2, 2);
  m << 1, -1, -1, 0;
  similarity_kernel k = kernel_from_matrix(m);
  k = rescale_nonnegative(std::move(k));
  REQUIRE(k.data(0, 0) == 1.0);
  REQUIRE(k.data(0, 1) == 0.0);
  REQUIRE(k.data(1, 1) == 0.5);
  REQUIRE(k.nonneg_rescaled);
}

TEST_CASE("rescale_nonnegative rejects out-of-range entries") {
  matrix m(1, 1);
  m << 1.5;
  REQUIRE_THROWS_AS(rescale_nonnegative(kernel_from_matrix(m)), data_error);
}

TEST_CASE("rescale is strictly monotone") {
  rng64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    double s = 2.0 * rng.next_canonical() - 1.0;
    double t = 2.0 * rng.next_canonical() - 1.0;
    if (s == t) continue;
    if (s > t) std::swap(s, t);
    matrix m(2, 2);
    m << s, 0, 0, t;
    const similarity_kernel k = rescale_nonnegative(kernel_from_matrix(m));
    REQUIRE(k.data(0, 0) < k.data(1, 1));
  }
}

TEST_CASE("regularize_psd shifts only the diagonal") {
  matrix m = matrix::Identity(2, 2);
  similarity_kernel k = regularize_psd(kernel_from_matrix(m), 0.01);
  REQUIRE(k.data(0, 0) == Approx(1.01));
  REQUIRE(k.data(1, 1) == Approx(1.01));
  REQUIRE(k.data(0, 1) == 0.0);
  REQUIRE(k.psd_ridge == Approx(0.01));

  matrix r1(2, 2);
  r1 << 1, 1, 1, 1;
  similarity_kernel k2 = regularize_psd(kernel_from_matrix(r1), 0.1);
  Eigen::SelfAdjointEigenSolver<matrix> eig(k2.data);
  REQUIRE(eig.eigenvalues()(0) == Approx(0.1).epsilon(1e-10));
  REQUIRE(eig.eigenvalues()(1) == Approx(2.1).epsilon(1e-10));
  REQUIRE(k2.data(0, 1) == 1.0);

  REQUIRE_THROWS_AS(regularize_psd(kernel_from_matrix(matrix::Identity(2, 2)), 0.0),
                    config_error);
  REQUIRE_THROWS_AS(regularize_psd(kernel_from_matrix(matrix::Identity(2, 2)), -0.1),
                    config_error);
}

TEST_CASE("joint kernel regions and block structure") {
  rng64 rng(7);
  const embedding_matrix g_u = test_helpers::random_unit_embeddings(rng, 3, 4);
  const embedding_matrix g_q = test_helpers::random_unit_embeddings(rng, 2, 4);
  const embedding_matrix g_p = test_helpers::random_unit_embeddings(rng, 1, 4);
  const similarity_kernel k = assemble_joint_kernel(g_u, g_q, g_p, false, 0.0);
  REQUIRE(k.size() == 6);
  REQUIRE(k.regions.unlabeled_indices() == index_list{0, 1, 2});
  REQUIRE(k.regions.query_indices() == index_list{3, 4});
  REQUIRE(k.regions.private_indices() == index_list{5});

  // Identical unlabeled rows give an all-ones block.
  embedding_matrix same(3, 4);
  same.row(0) = g_u.row(0);
  same.row(1) = g_u.row(0);
  same.row(2) = g_u.row(0);
  const similarity_kernel k2 = assemble_joint_kernel(same, g_q, g_p, false, 0.0);
  REQUIRE(k2.data.topLeftCorner(3, 3).isApproxToConstant(1.0, 1e-12));
}

TEST_CASE("joint kernel is symmetric and PSD before the ridge") {
  rng64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const embedding_matrix g_u = test_helpers::random_unit_embeddings(rng, 8, 5);
    const embedding_matrix g_q = test_helpers::random_unit_embeddings(rng, 3, 5);
    const embedding_matrix g_p = test_helpers::random_unit_embeddings(rng, 2, 5);
    const similarity_kernel k = assemble_joint_kernel(g_u, g_q, g_p, false, 0.0);
    REQUIRE((k.data - k.data.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    Eigen::SelfAdjointEigenSolver<matrix> eig(k.data);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-8);  // Gram matrix
  }
}

TEST_CASE("joint kernel applies rescale and ridge as flagged") {
  rng64 rng(17);
  const embedding_matrix g_u = test_helpers::random_unit_embeddings(rng, 4, 5);
  const embedding_matrix empty(0, 5);
  const similarity_kernel fl = assemble_joint_kernel(g_u, empty, empty, true, 0.0);
  REQUIRE(fl.nonneg_rescaled);
  REQUIRE(fl.data.minCoeff() >= 0.0);
  REQUIRE(fl.data.maxCoeff() <= 1.0);
  const similarity_kernel ld = assemble_joint_kernel(g_u, empty, empty, false, 0.05);
  REQUIRE(ld.psd_ridge == Approx(0.05));
  REQUIRE(ld.data(0, 0) == Approx(1.05));
}

TEST_CASE("kernel cache round-trips through the SIMK format") {
  rng64 rng(23);
  similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 9, 4);
  const std::string path =
      (std::filesystem::temp_directory_path() / "simsel_cache_test.simk").string();
  save_kernel_cache(k, path);

  const similarity_kernel back = load_kernel_cache(path);
  REQUIRE(back.size() == 9);
  REQUIRE(back.nonneg_rescaled);
  // Entries survive the float32 round trip.
  REQUIRE((back.data - k.data).cwiseAbs().maxCoeff() < 1e-6);

  // Header layout: magic, version, size, flags.
  std::ifstream is(path, std::ios::binary);
  char header[16];
  is.read(header, 16);
  REQUIRE(std::string(header, 4) == "SIMK");
  REQUIRE(static_cast<unsigned char>(header[8]) == 9);

  std::remove(path.c_str());
}

TEST_CASE("kernel cache rejects corrupt files") {
  namespace fs = std::filesystem;
  const std::string bad = (fs::temp_directory_path() / "simsel_bad_cache.simk").string();
  {
    std::ofstream os(bad, std::ios::binary);
    os << "NOPE";
  }
  REQUIRE_THROWS_AS(load_kernel_cache(bad), io_error);
  {
    rng64 rng(1);
    similarity_kernel k = test_helpers::random_rescaled_kernel(rng, 4, 3);
    save_kernel_cache(k, bad);
    fs::resize_file(bad, 20);  // truncate the payload
  }
  REQUIRE_THROWS_AS(load_kernel_cache(bad), io_error);
  REQUIRE_THROWS_AS(load_kernel_cache("/nonexistent/path.simk"), io_error);
  std::remove(bad.c_str());
}
