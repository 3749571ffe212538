/*
 * Copyright 2026 The COVIDX Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Test data builders shared by the unit and acceptance suites.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "covidx/dataset.hpp"
#include "covidx/image.hpp"
#include "covidx/rng.hpp"

#ifndef COVIDX_TEST_DATA_DIR
#define COVIDX_TEST_DATA_DIR "tests/data"
#endif

namespace covidx::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(COVIDX_TEST_DATA_DIR) / name;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "covidx") {
    std::string tmpl = (std::filesystem::temp_directory_path() / (tag + "-XXXXXX")).string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

// Gaussian-ish blobs per class, shifted apart by `separation` on feature 0.
inline LabeledDataset random_dataset(Rng& rng, size_t n, size_t d, double separation = 1.0) {
  LabeledDataset data;
  data.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    data.y.push_back(label);
    data.ids.push_back("row" + std::to_string(i));
    for (size_t j = 0; j < d; ++j) {
      double v = rng.uniform() * 2 - 1;
      if (j == 0) v += label * separation * 0.5;
      data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return data;
}

inline std::vector<std::vector<double>> rows_of(const Matrix& X) {
  std::vector<std::vector<double>> out;
  for (Eigen::Index r = 0; r < X.rows(); ++r) out.emplace_back(X.row(r).begin(), X.row(r).end());
  return out;
}

inline Image random_image(Rng& rng, int w, int h, int channels = 1) {
  std::vector<double> px(static_cast<size_t>(w) * h * channels);
  for (double& p : px) p = static_cast<double>(rng.uniform_index(256));
  return Image(w, h, channels, std::move(px));
}

}  // namespace covidx::testing
