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

#include "covidx/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "covidx/errors.hpp"
#include "covidx/rng.hpp"

namespace covidx {
namespace {

// Members of each distinct label, labels in ascending order.
std::map<int, std::vector<size_t>> group_by_label(std::span<const int> labels) {
  std::map<int, std::vector<size_t>> groups;
  for (size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

const std::vector<std::string> kMetricNames = {"roc_auc", "pr_auc", "f1"};

EvalReport cross_validate_with(const Trainer& trainer, const LabeledDataset& data,
                               const FoldAssignment& folds) {
  std::vector<double> roc, pr, f1;
  EvalReport report;
  report.confusion.assign(2, std::vector<long>(2, 0));
  static constexpr int kClasses[] = {-1, 1};

  for (int f = 0; f < folds.k; ++f) {
    const auto train_rows = folds.train_indices(f);
    const auto test_rows = folds.test_indices(f);
    const Scorer scorer = trainer(data.subset(train_rows));

    std::vector<double> scores;
    std::vector<int> predicted, truth;
    for (size_t r : test_rows) {
      const Prediction p = scorer(row_span(data.X, static_cast<Eigen::Index>(r)));
      scores.push_back(p.score);
      predicted.push_back(p.label);
      truth.push_back(data.y[r]);
    }
    roc.push_back(roc_auc(scores, truth));
    pr.push_back(pr_auc(scores, truth));
    f1.push_back(f1_score(predicted, truth, 1));
    const auto cm = confusion(predicted, truth, kClasses);
    for (size_t i = 0; i < 2; ++i)
      for (size_t j = 0; j < 2; ++j) report.confusion[i][j] += cm[i][j];
  }
  report.metrics["roc_auc"] = summarize(std::move(roc));
  report.metrics["pr_auc"] = summarize(std::move(pr));
  report.metrics["f1"] = summarize(std::move(f1));
  return report;
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  SplitIndices out;
  uint64_t stream = 0;
  for (auto& [label, members] : group_by_label(labels)) {
    if (members.size() < 2) {
      throw ClassTooSmall("class " + std::to_string(label) + " has fewer than 2 members");
    }
    Rng rng(seed, stream++);
    rng.shuffle(members);
    const auto n = static_cast<double>(members.size());
    const auto n_test = std::clamp<size_t>(static_cast<size_t>(std::llround(test_fraction * n)), 1,
                                           members.size() - 1);
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldAssignment kfold(std::span<const int> labels, int k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  FoldAssignment folds;
  folds.k = k;
  folds.fold_of.assign(labels.size(), -1);
  size_t next = 0;
  uint64_t stream = 0;
  for (auto& [label, members] : group_by_label(labels)) {
    if (members.size() < static_cast<size_t>(k)) {
      throw ClassTooSmall("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                          " members, fewer than k=" + std::to_string(k));
    }
    Rng rng(seed, stream++);
    rng.shuffle(members);
    for (size_t m : members) folds.fold_of[m] = static_cast<int>(next++ % static_cast<size_t>(k));
  }
  return folds;
}

MetricSummary summarize(std::vector<double> per_fold) {
  MetricSummary s;
  if (per_fold.empty()) return s;
  const auto n = static_cast<double>(per_fold.size());
  s.mean = std::accumulate(per_fold.begin(), per_fold.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : per_fold) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  s.per_fold = std::move(per_fold);
  return s;
}

Trainer make_trainer(const LearnerConfig& config) {
  return [config](const LabeledDataset& train) -> Scorer {
    auto model = std::make_shared<const TrainedModel>(fit_model(config, train));
    return [model](std::span<const double> x) { return predict(*model, x); };
  };
}

EvalReport cross_validate(const Trainer& trainer, const LabeledDataset& data, int k, uint64_t seed) {
  data.validate(true);
  return cross_validate_with(trainer, data, kfold(data.y, k, seed));
}

EvalReport cross_validate(const LearnerConfig& config, const LabeledDataset& data, int k, uint64_t seed) {
  return cross_validate(make_trainer(config), data, k, seed);
}

std::map<std::string, double> evaluate_scorer(const Scorer& scorer, const LabeledDataset& data) {
  std::vector<double> scores;
  std::vector<int> predicted;
  for (size_t r = 0; r < data.size(); ++r) {
    const Prediction p = scorer(row_span(data.X, static_cast<Eigen::Index>(r)));
    scores.push_back(p.score);
    predicted.push_back(p.label);
  }
  return {{"roc_auc", roc_auc(scores, data.y)},
          {"pr_auc", pr_auc(scores, data.y)},
          {"f1", f1_score(predicted, data.y, 1)}};
}

GridResult grid_search(std::span<const LearnerConfig> grid, const LabeledDataset& data, int k,
                       const std::string& metric, uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("grid must contain at least one setting");
  if (std::find(kMetricNames.begin(), kMetricNames.end(), metric) == kMetricNames.end()) {
    throw ConfigError("unknown selection metric: " + metric);
  }
  data.validate(true);
  const FoldAssignment folds = kfold(data.y, k, seed);
  GridResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    EvalReport report = cross_validate_with(make_trainer(grid[i]), data, folds);
    const double value = report.at(metric).mean;
    if (value > best) {
      best = value;
      result.best_index = i;
    }
    result.cells.push_back({grid[i], std::move(report)});
  }
  return result;
}

}  // namespace covidx
