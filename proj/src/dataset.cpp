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

#include "covidx/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covidx/errors.hpp"

namespace covidx {

size_t LabeledDataset::count(int label) const {
  return static_cast<size_t>(std::count(y.begin(), y.end(), label));
}

void LabeledDataset::validate(bool require_both_classes) const {
  if (static_cast<size_t>(X.rows()) != y.size()) throw std::invalid_argument("X rows and labels differ in length");
  if (!ids.empty() && ids.size() != y.size()) throw std::invalid_argument("ids and labels differ in length");
  if (y.size() < 2) throw ClassTooSmall("dataset needs at least 2 rows");
  for (int label : y) {
    if (label != 1 && label != -1) throw std::invalid_argument("labels must be +1 or -1");
  }
  if (!X.allFinite()) throw std::invalid_argument("feature matrix has non-finite entries");
  if (require_both_classes && (count(1) == 0 || count(-1) == 0)) {
    throw ClassTooSmall("training data must contain both classes");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const size_t> rows) const {
  LabeledDataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
    if (!ids.empty()) out.ids.push_back(ids[rows[i]]);
  }
  return out;
}

Scaler fit_scaler(const Matrix& X) {
  if (X.rows() == 0) throw std::invalid_argument("cannot fit a scaler on an empty matrix");
  const auto n = static_cast<double>(X.rows());
  Scaler s;
  s.mean.resize(static_cast<size_t>(X.cols()));
  s.std.resize(static_cast<size_t>(X.cols()));
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const auto col = X.col(c);
    const double first = col(0);
    if ((col.array() == first).all()) {
      s.mean[c] = first;
      s.std[c] = 1.0;
      continue;
    }
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    s.mean[c] = mean;
    s.std[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

std::vector<double> Scaler::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw DimensionError("feature vector length does not match scaler");
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / std[i];
  return out;
}

Matrix Scaler::apply(const Matrix& X) const {
  if (static_cast<size_t>(X.cols()) != mean.size()) throw DimensionError("matrix width does not match scaler");
  Matrix out(X.rows(), X.cols());
  for (Eigen::Index r = 0; r < X.rows(); ++r)
    for (Eigen::Index c = 0; c < X.cols(); ++c) out(r, c) = (X(r, c) - mean[c]) / std[c];
  return out;
}

Matrix apply_scaler(const Scaler& scaler, const Matrix& X) { return scaler.apply(X); }

}  // namespace covidx
