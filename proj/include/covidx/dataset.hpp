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

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace covidx {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<size_t>(m.cols())};
}

// Binary-labelled feature matrix. Labels are +1 / -1.
struct LabeledDataset {
  Matrix X;
  std::vector<int> y;
  std::vector<std::string> ids;

  size_t size() const { return y.size(); }
  size_t dim() const { return static_cast<size_t>(X.cols()); }
  size_t count(int label) const;

  // Throws std::invalid_argument for shape, label or finiteness violations and
  // ClassTooSmall when `require_both_classes` and a class is absent.
  void validate(bool require_both_classes) const;

  // Rows in the given order; repeats allowed.
  LabeledDataset subset(std::span<const size_t> rows) const;
};

// Per-column standardization. Constant columns get std 1 and their exact
// value as mean, so they map to 0.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> std;

  size_t dim() const { return mean.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& X) const;
};

Scaler fit_scaler(const Matrix& X);
Matrix apply_scaler(const Scaler& scaler, const Matrix& X);

}  // namespace covidx
