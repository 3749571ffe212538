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

// Tree ensembles: a bagged random forest and gradient boosting on the
// logistic loss.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covidx/dataset.hpp"
#include "covidx/tree.hpp"

namespace covidx {

struct ForestParams {
  int n_trees = 100;
  // 0 selects floor(sqrt(d)).
  int max_features = 0;
  // 0 means unlimited.
  int max_depth = 0;
  int min_samples_split = 2;
  bool bootstrap = true;
  // Majority vote over trees instead of averaging leaf probabilities.
  bool hard_vote = false;
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
  ForestParams params;
  Scaler scaler;
  std::vector<DecisionTree> trees;
};

ForestModel forest_fit(const LabeledDataset& data, const ForestParams& params);
// Mean over trees of the leaf P(+1) (or of the per-tree vote with hard_vote).
double forest_proba(const ForestModel& model, std::span<const double> x);

struct BoostParams {
  double learning_rate = 0.1;
  int max_depth = 3;
  int n_rounds = 100;
  double subsample = 1.0;
  int min_samples_split = 2;
  // Multiplier on gradient and hessian of positive rows.
  double positive_weight = 1.0;
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const BoostParams&) const = default;
};

struct BoostModel {
  BoostParams params;
  Scaler scaler;
  // log(pos / neg) of the training labels.
  double base_score = 0.0;
  std::vector<DecisionTree> trees;
};

BoostModel boost_fit(const LabeledDataset& data, const BoostParams& params);
// Additive log-odds using the first `rounds` trees (all when negative).
double boost_margin(const BoostModel& model, std::span<const double> x, int rounds = -1);
double boost_proba(const BoostModel& model, std::span<const double> x);

double sigmoid(double z);
// Mean binary cross-entropy of P(+1) against +1/-1 labels.
double log_loss(std::span<const double> proba, std::span<const int> y);

}  // namespace covidx
