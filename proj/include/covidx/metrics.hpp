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

// Threshold-free ranking metrics and label-based summaries.

#pragma once

#include <span>
#include <vector>

namespace covidx {

// Mann-Whitney estimate of P(score_pos > score_neg) with half credit for
// ties. Labels are +1 / -1. Throws SingleClassError.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Average precision: sum over distinct score thresholds (descending) of
// (recall gain) x precision, with no interpolation between PR points. Tied
// scores form a single threshold. Throws NoPositivesError.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

// One-vs-rest F1 of `positive_class`; 0 when precision + recall is 0.
double f1_score(std::span<const int> predicted, std::span<const int> truth, int positive_class);

// Rows are true classes, columns predicted classes, both in `classes` order.
// Throws std::invalid_argument for labels outside `classes`.
using ConfusionMatrix = std::vector<std::vector<long>>;
ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> truth,
                          std::span<const int> classes);

// Per-class one-vs-rest F1 straight from a confusion matrix.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);
double macro_f1(const ConfusionMatrix& cm);

}  // namespace covidx
