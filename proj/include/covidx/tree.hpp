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

// Binary decision trees shared by the forest (Gini classification trees) and
// the boosting learner (least-squares regression trees with Newton leaves).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "covidx/dataset.hpp"
#include "covidx/rng.hpp"

namespace covidx {

struct TreeNode {
  // feature < 0 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaf payload: P(y = +1) for classification trees, additive score for
  // regression trees.
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  // x[feature] <= threshold goes left.
  double predict(std::span<const double> x) const;
  const TreeNode& leaf_for(std::span<const double> x) const;
  size_t depth() const;
  bool operator==(const DecisionTree&) const = default;
};

struct TreeParams {
  // 0 means unlimited.
  int max_depth = 0;
  int min_samples_split = 2;
  // Features drawn per split; 0 or >= d means all features.
  int max_features = 0;
};

// Row indices of X sorted by (value, row) for every column. Building it once
// per fit lets the tree builders skip per-node sorting on large nodes.
struct ColumnOrder {
  std::vector<std::vector<uint32_t>> columns;

  static ColumnOrder of(const Matrix& X);
};

// CART with Gini impurity on the rows listed in `rows` (repeats count as
// bootstrap multiplicity). Equal-gain splits resolve to the lowest feature
// index and then the lowest threshold, so the tree does not depend on the
// order in which candidate features were drawn.
DecisionTree fit_classification_tree(const Matrix& X, std::span<const int> y,
                                     std::span<const size_t> rows, const TreeParams& params,
                                     Rng& rng, const ColumnOrder* order = nullptr);

// Splits minimize squared error of `target`; each leaf stores
// sum(target) / sum(hessian) over its rows.
DecisionTree fit_regression_tree(const Matrix& X, std::span<const double> target,
                                 std::span<const double> hessian, std::span<const size_t> rows,
                                 const TreeParams& params, Rng& rng,
                                 const ColumnOrder* order = nullptr);

}  // namespace covidx
