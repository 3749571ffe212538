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

// Stratified splitting, k-fold cross-validation and grid search.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "covidx/dataset.hpp"
#include "covidx/metrics.hpp"
#include "covidx/model.hpp"

namespace covidx {

struct SplitIndices {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// Per class, round(test_fraction * n_c) members go to test (at least one and
// never the whole class). Indices are returned sorted. Throws ClassTooSmall
// when a class has fewer than two members.
SplitIndices stratified_split(std::span<const int> labels, double test_fraction, uint64_t seed);

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;

  std::vector<size_t> test_indices(int fold) const;
  std::vector<size_t> train_indices(int fold) const;
};

// Each class is shuffled and dealt round-robin over the folds, continuing
// where the previous class stopped. Throws ClassTooSmall when a class has
// fewer than k members.
FoldAssignment kfold(std::span<const int> labels, int k, uint64_t seed);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population std over folds
  std::vector<double> per_fold;
};

struct EvalReport {
  // "roc_auc", "pr_auc", "f1".
  std::map<std::string, MetricSummary> metrics;
  // Rows true {-1, +1}, columns predicted {-1, +1}, summed over folds.
  ConfusionMatrix confusion;

  const MetricSummary& at(const std::string& name) const { return metrics.at(name); }
};

MetricSummary summarize(std::vector<double> per_fold);

using Scorer = std::function<Prediction(std::span<const double>)>;
// Receives only the training rows of a fold.
using Trainer = std::function<Scorer(const LabeledDataset&)>;

Trainer make_trainer(const LearnerConfig& config);

// ROC AUC, PR AUC and F1 (positive class +1) per fold.
EvalReport cross_validate(const Trainer& trainer, const LabeledDataset& data, int k, uint64_t seed);
EvalReport cross_validate(const LearnerConfig& config, const LabeledDataset& data, int k, uint64_t seed);

// Metrics on a held-out set for an already fitted scorer.
std::map<std::string, double> evaluate_scorer(const Scorer& scorer, const LabeledDataset& data);

struct GridCell {
  LearnerConfig config;
  EvalReport report;
};

struct GridResult {
  size_t best_index = 0;
  std::vector<GridCell> cells;

  const LearnerConfig& best() const { return cells[best_index].config; }
};

// Every setting is scored with the same fold assignment; the highest mean of
// `metric` wins and ties go to the earliest setting.
GridResult grid_search(std::span<const LearnerConfig> grid, const LabeledDataset& data, int k,
                       const std::string& metric, uint64_t seed);

}  // namespace covidx
