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

#include "covidx/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "covidx/errors.hpp"

namespace covidx {
namespace {

constexpr double kTau = 1e-12;

// Lazily materialized rows of Q_ij = y_i y_j K(x_i, x_j).
class QMatrix {
 public:
  QMatrix(const Matrix& X, std::span<const int> y, const SvmParams& params)
      : X_(X), y_(y), params_(params), rows_(y.size()), diag_(y.size()) {
    for (size_t i = 0; i < y.size(); ++i) diag_[i] = kernel_value(params, row_span(X, i), row_span(X, i));
  }

  const std::vector<double>& row(size_t i) {
    auto& r = rows_[i];
    if (!r) {
      r.emplace(y_.size());
      const auto xi = row_span(X_, static_cast<Eigen::Index>(i));
      for (size_t j = 0; j < y_.size(); ++j) {
        (*r)[j] = y_[i] * y_[j] * kernel_value(params_, xi, row_span(X_, static_cast<Eigen::Index>(j)));
      }
    }
    return *r;
  }

  double diag(size_t i) const { return diag_[i]; }

 private:
  const Matrix& X_;
  std::span<const int> y_;
  const SvmParams& params_;
  std::vector<std::optional<std::vector<double>>> rows_;
  std::vector<double> diag_;
};

// Working-set selection with second-order gain (Fan, Chen & Lin) and the
// pairwise analytic update. Returns the offset rho, decision = Q-part - rho.
DualSolution smo(const Matrix& X, std::span<const int> y, const SvmParams& params) {
  const size_t n = y.size();
  std::vector<double> upper(n);
  for (size_t i = 0; i < n; ++i) {
    upper[i] = params.C * (y[i] > 0 ? params.positive_weight : params.negative_weight);
  }
  QMatrix Q(X, y, params);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  auto is_upper = [&](size_t t) { return alpha[t] >= upper[t]; };
  auto is_lower = [&](size_t t) { return alpha[t] <= 0.0; };

  const size_t max_iter = static_cast<size_t>(std::max(params.max_passes, 1)) * std::max<size_t>(n, 1);
  DualSolution sol;
  sol.status = SolverStatus::kIterationLimit;

  size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gmax_idx = -1;
    std::ptrdiff_t gmin_idx = -1;
    double obj_diff_min = std::numeric_limits<double>::infinity();

    for (size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!is_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          gmax_idx = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!is_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        gmax_idx = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (gmax_idx < 0) {
      sol.status = SolverStatus::kConverged;
      break;
    }
    const auto i = static_cast<size_t>(gmax_idx);
    const std::vector<double>& qi = Q.row(i);

    for (size_t j = 0; j < n; ++j) {
      if (y[j] > 0) {
        if (is_lower(j)) continue;
        const double grad_diff = gmax + grad[j];
        gmax2 = std::max(gmax2, grad[j]);
        if (grad_diff > 0) {
          double quad = Q.diag(i) + Q.diag(j) - 2.0 * y[i] * qi[j];
          if (quad <= 0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = obj_diff;
          }
        }
      } else {
        if (is_upper(j)) continue;
        const double grad_diff = gmax - grad[j];
        gmax2 = std::max(gmax2, -grad[j]);
        if (grad_diff > 0) {
          double quad = Q.diag(i) + Q.diag(j) + 2.0 * y[i] * qi[j];
          if (quad <= 0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(j);
            obj_diff_min = obj_diff;
          }
        }
      }
    }
    if (gmax + gmax2 < params.tol || gmin_idx < 0) {
      sol.status = SolverStatus::kConverged;
      break;
    }

    const auto j = static_cast<size_t>(gmin_idx);
    const std::vector<double>& qj = Q.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double ci = upper[i];
    const double cj = upper[j];

    if (y[i] != y[j]) {
      double quad = Q.diag(i) + Q.diag(j) + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = Q.diag(i) + Q.diag(j) - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (size_t k = 0; k < n; ++k) grad[k] += qi[k] * dai + qj[k] * daj;
  }
  sol.iterations = iter;

  // Offset: average over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  size_t n_free = 0;
  for (size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (is_upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  sol.alphas = std::move(alpha);
  sol.bias = -rho;
  return sol;
}

}  // namespace

void SvmParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("SVM C must be positive");
  if (kernel == KernelKind::kRbf && !(gamma > 0.0)) throw ConfigError("RBF gamma must be positive");
  if (!(tol > 0.0)) throw ConfigError("SVM tol must be positive");
  if (max_passes < 1) throw ConfigError("SVM max_passes must be >= 1");
  if (!(positive_weight > 0.0) || !(negative_weight > 0.0)) throw ConfigError("class weights must be positive");
}

double kernel_value(const SvmParams& params, std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  if (params.kernel == KernelKind::kLinear) {
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::exp(-params.gamma * acc);
}

DualSolution solve_dual(const Matrix& X, std::span<const int> y, const SvmParams& params) {
  params.validate();
  // Solve with the first label mapped to +1 and map back. The optimum is
  // label-flip symmetric; canonicalizing makes the computed one symmetric too.
  if (!y.empty() && y[0] < 0) {
    std::vector<int> flipped(y.size());
    std::transform(y.begin(), y.end(), flipped.begin(), [](int v) { return -v; });
    SvmParams p = params;
    std::swap(p.positive_weight, p.negative_weight);
    DualSolution sol = smo(X, flipped, p);
    sol.bias = -sol.bias;
    return sol;
  }
  return smo(X, y, params);
}

SvmModel svm_fit(const LabeledDataset& data, const SvmParams& params) {
  data.validate(true);
  params.validate();
  SvmModel model;
  model.params = params;
  model.scaler = fit_scaler(data.X);
  const Matrix Xs = model.scaler.apply(data.X);
  DualSolution sol = solve_dual(Xs, data.y, params);

  std::vector<Eigen::Index> support;
  for (size_t i = 0; i < sol.alphas.size(); ++i) {
    if (sol.alphas[i] > 0.0) support.push_back(static_cast<Eigen::Index>(i));
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(support.size()), Xs.cols());
  for (size_t k = 0; k < support.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = Xs.row(support[k]);
    model.alphas.push_back(sol.alphas[static_cast<size_t>(support[k])]);
    model.labels.push_back(data.y[static_cast<size_t>(support[k])]);
  }
  model.bias = sol.bias;
  model.status = sol.status;
  model.iterations = sol.iterations;
  return model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.scaler.dim()) {
    throw DimensionError("expected " + std::to_string(model.scaler.dim()) + " features, got " +
                         std::to_string(x.size()));
  }
  const std::vector<double> xs = model.scaler.apply(x);
  double acc = 0.0;
  for (size_t k = 0; k < model.alphas.size(); ++k) {
    acc += model.alphas[k] * model.labels[k] *
           kernel_value(model.params, row_span(model.support_vectors, static_cast<Eigen::Index>(k)), xs);
  }
  return acc + model.bias;
}

int svm_predict(const SvmModel& model, std::span<const double> x) {
  return svm_decision(model, x) >= 0.0 ? 1 : -1;
}

}  // namespace covidx
