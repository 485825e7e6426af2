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
// Dataset files. The canonical form is a CSV with header
//   id,f0..f{d-1},label,split,dist
// where split is one of {labeled, unlabeled, test} and dist is {id, ood}.
// An optional binary companion stores the features as row-major IEEE-754
// single-precision little-endian values next to a JSON manifest giving
// rows/dim/paths; the loader accepts either the CSV or the manifest.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simsel/errors.hpp"
#include "simsel/kernel.hpp"

namespace simsel {

enum class split_kind { labeled, unlabeled, test };

inline const char* to_string(split_kind s) {
  switch (s) {
    case split_kind::labeled: return "labeled";
    case split_kind::unlabeled: return "unlabeled";
    case split_kind::test: return "test";
  }
  return "?";
}

struct dataset {
  matrix features;               // N x d
  std::vector<int> ids;          // id column
  std::vector<int> labels;       // class; OOD rows carry the OOD class
  std::vector<split_kind> split;
  std::vector<char> is_ood;      // the dist column; ground truth, oracle-only

  int rows() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }

  // Highest class among in-distribution rows plus one.
  int num_id_classes() const {
    int top = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!is_ood[i]) top = std::max(top, labels[i]);
    }
    return top + 1;
  }

  index_list rows_in(split_kind s) const {
    index_list out;
    for (int i = 0; i < rows(); ++i) {
      if (split[static_cast<std::size_t>(i)] == s) out.push_back(i);
    }
    return out;
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline void write_dataset_csv(const dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw io_error("write_dataset_csv: cannot open " + path);
  os << "id";
  for (int k = 0; k < ds.dim(); ++k) os << ",f" << k;
  os << ",label,split,dist\n";
  for (int r = 0; r < ds.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    os << ds.ids[i];
    for (int k = 0; k < ds.dim(); ++k) {
      os << ',' << detail::format_double(ds.features(r, k));
    }
    os << ',' << ds.labels[i] << ',' << to_string(ds.split[i]) << ','
       << (ds.is_ood[i] ? "ood" : "id") << '\n';
  }
  if (!os) throw io_error("write_dataset_csv: write failed for " + path);
}

inline dataset read_dataset_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw io_error("read_dataset_csv: empty file " + path);
  const auto header = detail::split_csv_line(line);
  if (header.size() < 4 || header.front() != "id" || header.back() != "dist") {
    throw data_error("read_dataset_csv: unexpected header in " + path);
  }
  const int dim = static_cast<int>(header.size()) - 4;

  dataset ds;
  std::vector<double> values;
  int row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim + 4) {
      throw data_error("read_dataset_csv: row " + std::to_string(row) +
                       " has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(dim + 4));
    }
    ds.ids.push_back(std::stoi(fields[0]));
    for (int k = 0; k < dim; ++k) {
      values.push_back(std::stod(fields[static_cast<std::size_t>(1 + k)]));
    }
    ds.labels.push_back(std::stoi(fields[static_cast<std::size_t>(dim + 1)]));
    const std::string& sp = fields[static_cast<std::size_t>(dim + 2)];
    if (sp == "labeled") {
      ds.split.push_back(split_kind::labeled);
    } else if (sp == "unlabeled") {
      ds.split.push_back(split_kind::unlabeled);
    } else if (sp == "test") {
      ds.split.push_back(split_kind::test);
    } else {
      throw data_error("read_dataset_csv: unknown split '" + sp + "' at row " +
                       std::to_string(row));
    }
    const std::string& di = fields[static_cast<std::size_t>(dim + 3)];
    if (di == "id") {
      ds.is_ood.push_back(0);
    } else if (di == "ood") {
      ds.is_ood.push_back(1);
    } else {
      throw data_error("read_dataset_csv: unknown dist '" + di + "' at row " +
                       std::to_string(row));
    }
    ++row;
  }
  ds.features = matrix(row, dim);
  for (int r = 0; r < row; ++r) {
    for (int k = 0; k < dim; ++k) {
      ds.features(r, k) = values[static_cast<std::size_t>(r) * dim + k];
    }
  }
  return ds;
}

// Writes dataset.csv plus the binary companion (features.bin + manifest.json)
// into `dir`; returns the manifest path.
inline std::string write_dataset_with_binary(const dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string csv_path = (fs::path(dir) / "dataset.csv").string();
  const std::string bin_path = (fs::path(dir) / "features.bin").string();
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  write_dataset_csv(ds, csv_path);

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw io_error("write_dataset_with_binary: cannot open " + bin_path);
  using row_major_f = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  row_major_f buf = ds.features.cast<float>();
  if constexpr (std::endian::native == std::endian::little) {
    bin.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(sizeof(float) * buf.size()));
  } else {
    std::string bytes;
    for (Eigen::Index i = 0; i < buf.size(); ++i) {
      detail::put_u32_le(bytes, std::bit_cast<std::uint32_t>(buf.data()[i]));
    }
    bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!bin) throw io_error("write_dataset_with_binary: write failed for " + bin_path);

  nlohmann::json manifest;
  manifest["rows"] = ds.rows();
  manifest["dim"] = ds.dim();
  manifest["features"] = "features.bin";
  manifest["csv"] = "dataset.csv";
  std::ofstream mos(manifest_path);
  mos << manifest.dump(2) << '\n';
  if (!mos) throw io_error("write_dataset_with_binary: write failed for " + manifest_path);
  return manifest_path;
}

// Loads a dataset from either a CSV path or a JSON manifest path. With a
// manifest, the metadata comes from the companion CSV and the features are
// read from the binary file.
inline dataset read_dataset(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::path(path).extension() != ".json") {
    return read_dataset_csv(path);
  }
  std::ifstream is(path);
  if (!is) throw io_error("read_dataset: cannot open " + path);
  nlohmann::json manifest;
  try {
    is >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw io_error("read_dataset: bad manifest " + path + ": " + e.what());
  }
  const auto dir = fs::path(path).parent_path();
  const int rows = manifest.at("rows").get<int>();
  const int dim = manifest.at("dim").get<int>();
  dataset ds = read_dataset_csv((dir / manifest.at("csv").get<std::string>()).string());
  if (ds.rows() != rows || ds.dim() != dim) {
    throw data_error("read_dataset: manifest rows/dim disagree with CSV");
  }

  const std::string bin_path = (dir / manifest.at("features").get<std::string>()).string();
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw io_error("read_dataset: cannot open " + bin_path);
  using row_major_f = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  row_major_f buf(rows, dim);
  bin.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(sizeof(float) * buf.size()));
  if (!bin) throw io_error("read_dataset: truncated feature file " + bin_path);
  if constexpr (std::endian::native != std::endian::little) {
    for (Eigen::Index i = 0; i < buf.size(); ++i) {
      std::uint32_t raw = std::bit_cast<std::uint32_t>(buf.data()[i]);
      unsigned char b[4];
      std::memcpy(b, &raw, 4);
      buf.data()[i] = std::bit_cast<float>(detail::get_u32_le(b));
    }
  }
  ds.features = buf.cast<double>();
  return ds;
}

}  // namespace simsel
