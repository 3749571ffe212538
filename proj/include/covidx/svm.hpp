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

// Soft-margin support vector classifier trained in the dual with sequential
// minimal optimization. The regularization weight on ||w||^2 is 1 / C.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "covidx/dataset.hpp"

namespace covidx {

enum class KernelKind { kLinear, kRbf };

struct SvmParams {
  double C = 1.0;
  KernelKind kernel = KernelKind::kLinear;
  double gamma = 0.1;
  // Stop when the maximal KKT violation (m(a) - M(a)) drops below tol.
  double tol = 1e-3;
  // Iteration budget is max_passes * N pair updates.
  int max_passes = 200;
  // Multipliers on C per class; 1 disables class weighting.
  double positive_weight = 1.0;
  double negative_weight = 1.0;

  void validate() const;
  bool operator==(const SvmParams&) const = default;
};

enum class SolverStatus { kConverged, kIterationLimit };

struct SvmModel {
  SvmParams params;
  Scaler scaler;
  // Standardized support vectors (rows with alpha > 0).
  Matrix support_vectors;
  std::vector<double> alphas;
  std::vector<int> labels;
  double bias = 0.0;
  SolverStatus status = SolverStatus::kConverged;
  size_t iterations = 0;
};

double kernel_value(const SvmParams& params, std::span<const double> a, std::span<const double> b);

// Fits on X after standardizing it with a scaler fitted on the same rows.
SvmModel svm_fit(const LabeledDataset& data, const SvmParams& params);

// Result of the dual solve on already-prepared inputs. Exposed for tests.
struct DualSolution {
  std::vector<double> alphas;
  double bias = 0.0;
  SolverStatus status = SolverStatus::kConverged;
  size_t iterations = 0;
};
DualSolution solve_dual(const Matrix& X, std::span<const int> y, const SvmParams& params);

// sum_i alpha_i y_i K(sv_i, x) + b on a raw (unscaled) feature vector.
// Throws DimensionError.
double svm_decision(const SvmModel& model, std::span<const double> x);
// Ties at exactly 0 go to +1.
int svm_predict(const SvmModel& model, std::span<const double> x);

}  // namespace covidx
