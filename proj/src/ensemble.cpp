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

#include "covidx/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covidx/errors.hpp"
#include "covidx/rng.hpp"

namespace covidx {

void ForestParams::validate() const {
  if (n_trees < 1) throw ConfigError("forest n_trees must be >= 1");
  if (max_features < 0) throw ConfigError("forest max_features must be >= 0");
  if (max_depth < 0) throw ConfigError("forest max_depth must be >= 0");
  if (min_samples_split < 2) throw ConfigError("forest min_samples_split must be >= 2");
}

ForestModel forest_fit(const LabeledDataset& data, const ForestParams& params) {
  data.validate(true);
  params.validate();
  ForestModel model;
  model.params = params;
  model.scaler = fit_scaler(data.X);
  const Matrix Xs = model.scaler.apply(data.X);
  const size_t n = data.size();
  const int d = static_cast<int>(data.dim());

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_split = params.min_samples_split;
  tp.max_features = params.max_features > 0
                        ? std::min(params.max_features, d)
                        : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));

  model.trees.reserve(static_cast<size_t>(params.n_trees));
  const ColumnOrder order = ColumnOrder::of(Xs);
  std::vector<size_t> rows(n);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(params.seed, static_cast<uint64_t>(t));
    if (params.bootstrap) {
      for (size_t i = 0; i < n; ++i) rows[i] = rng.uniform_index(n);
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), size_t{0});
    }
    model.trees.push_back(fit_classification_tree(Xs, data.y, rows, tp, rng, &order));
  }
  return model;
}

double forest_proba(const ForestModel& model, std::span<const double> x) {
  const std::vector<double> xs = model.scaler.apply(x);
  double acc = 0.0;
  for (const DecisionTree& tree : model.trees) {
    const double p = tree.predict(xs);
    acc += model.params.hard_vote ? (p >= 0.5 ? 1.0 : 0.0) : p;
  }
  return acc / static_cast<double>(model.trees.size());
}

void BoostParams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("boost learning_rate must be positive");
  if (max_depth < 1) throw ConfigError("boost max_depth must be >= 1");
  if (n_rounds < 0) throw ConfigError("boost n_rounds must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("boost subsample must lie in (0, 1]");
  if (min_samples_split < 2) throw ConfigError("boost min_samples_split must be >= 2");
  if (!(positive_weight > 0.0)) throw ConfigError("boost positive_weight must be positive");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_loss(std::span<const double> proba, std::span<const int> y) {
  constexpr double kEps = 1e-15;
  double acc = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double p = std::clamp(proba[i], kEps, 1.0 - kEps);
    acc -= y[i] > 0 ? std::log(p) : std::log(1.0 - p);
  }
  return acc / static_cast<double>(y.size());
}

BoostModel boost_fit(const LabeledDataset& data, const BoostParams& params) {
  data.validate(true);
  params.validate();
  BoostModel model;
  model.params = params;
  model.scaler = fit_scaler(data.X);
  const Matrix Xs = model.scaler.apply(data.X);
  const size_t n = data.size();
  const auto pos = static_cast<double>(data.count(1));
  const auto neg = static_cast<double>(data.count(-1));
  model.base_score = std::log(pos / neg);

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_split = params.min_samples_split;

  const ColumnOrder order = ColumnOrder::of(Xs);
  std::vector<double> margin(n, model.base_score);
  std::vector<double> residual(n), hessian(n);
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), size_t{0});
  const auto sample_size = std::clamp<size_t>(
      static_cast<size_t>(std::llround(params.subsample * static_cast<double>(n))), 1, n);

  for (int round = 0; round < params.n_rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      const double w = data.y[i] > 0 ? params.positive_weight : 1.0;
      residual[i] = w * ((data.y[i] > 0 ? 1.0 : 0.0) - p);
      hessian[i] = w * p * (1.0 - p);
    }
    Rng rng(params.seed, static_cast<uint64_t>(round));
    std::vector<size_t> rows = all;
    if (sample_size < n) {
      // Partial Fisher-Yates.
      for (size_t i = 0; i < sample_size; ++i) std::swap(rows[i], rows[i + rng.uniform_index(n - i)]);
      rows.resize(sample_size);
      std::sort(rows.begin(), rows.end());
    }
    DecisionTree tree = fit_regression_tree(Xs, residual, hessian, rows, tp, rng, &order);
    for (auto& node : tree.nodes) {
      if (node.is_leaf()) node.value *= params.learning_rate;
    }
    for (size_t i = 0; i < n; ++i) margin[i] += tree.predict(row_span(Xs, static_cast<Eigen::Index>(i)));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double boost_margin(const BoostModel& model, std::span<const double> x, int rounds) {
  const std::vector<double> xs = model.scaler.apply(x);
  const size_t limit = rounds < 0 ? model.trees.size()
                                  : std::min(model.trees.size(), static_cast<size_t>(rounds));
  double z = model.base_score;
  for (size_t t = 0; t < limit; ++t) z += model.trees[t].predict(xs);
  return z;
}

double boost_proba(const BoostModel& model, std::span<const double> x) {
  return sigmoid(boost_margin(model, x));
}

}  // namespace covidx
