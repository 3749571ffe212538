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

#include "covidx/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "covidx/errors.hpp"

namespace covidx {
namespace {

void check_lengths(size_t a, size_t b) {
  if (a != b) throw std::invalid_argument("scores and labels differ in length");
}

// Indices ordered by descending score.
std::vector<size_t> by_descending_score(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

double f1_from_counts(double tp, double fp, double fn) {
  const double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 0.0;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const auto order = by_descending_score(scores);
  double pos_total = 0.0, neg_total = 0.0;
  for (int l : labels) (l > 0 ? pos_total : neg_total) += 1.0;
  if (pos_total == 0.0 || neg_total == 0.0) throw SingleClassError("ROC AUC needs both classes");

  // Sweep tie groups from the top; every positive beats the negatives below.
  double correct = 0.0;
  double neg_above = 0.0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    double pos = 0.0, neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] > 0 ? pos : neg) += 1.0;
      ++j;
    }
    correct += pos * (neg_total - neg_above - neg) + 0.5 * pos * neg;
    neg_above += neg;
    i = j;
  }
  return correct / (pos_total * neg_total);
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const auto order = by_descending_score(scores);
  double pos_total = 0.0;
  for (int l : labels) pos_total += l > 0 ? 1.0 : 0.0;
  if (pos_total == 0.0) throw NoPositivesError("PR AUC needs at least one positive");

  double ap = 0.0;
  double tp = 0.0, fp = 0.0;
  double prev_recall = 0.0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] > 0 ? tp : fp) += 1.0;
      ++j;
    }
    const double recall = tp / pos_total;
    if (recall > prev_recall) {
      ap += (recall - prev_recall) * (tp / (tp + fp));
      prev_recall = recall;
    }
    i = j;
  }
  return ap;
}

double f1_score(std::span<const int> predicted, std::span<const int> truth, int positive_class) {
  check_lengths(predicted.size(), truth.size());
  double tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == positive_class;
    const bool t = truth[i] == positive_class;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  return f1_from_counts(tp, fp, fn);
}

ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> truth,
                          std::span<const int> classes) {
  check_lengths(predicted.size(), truth.size());
  auto index_of = [&](int label) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw std::invalid_argument("label " + std::to_string(label) + " not in class list");
    return static_cast<size_t>(it - classes.begin());
  };
  ConfusionMatrix cm(classes.size(), std::vector<long>(classes.size(), 0));
  for (size_t i = 0; i < truth.size(); ++i) ++cm[index_of(truth[i])][index_of(predicted[i])];
  return cm;
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
  const size_t k = cm.size();
  std::vector<double> out(k);
  for (size_t c = 0; c < k; ++c) {
    double fp = 0, fn = 0;
    for (size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fn += static_cast<double>(cm[c][o]);
      fp += static_cast<double>(cm[o][c]);
    }
    out[c] = f1_from_counts(static_cast<double>(cm[c][c]), fp, fn);
  }
  return out;
}

double macro_f1(const ConfusionMatrix& cm) {
  const auto f1 = per_class_f1(cm);
  if (f1.empty()) return 0.0;
  return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
}

}  // namespace covidx
