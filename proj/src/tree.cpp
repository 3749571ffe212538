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

#include "covidx/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace covidx {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

// Per-row statistics a split criterion accumulates.
struct ClassStats {
  double pos = 0, neg = 0;
  void add(double w, int label) { (label > 0 ? pos : neg) += w; }
  void sub(double w, int label) { (label > 0 ? pos : neg) -= w; }
  double n() const { return pos + neg; }
  // Negated weighted Gini: larger is better. n * (1 - gini) = (pos^2 + neg^2) / n.
  double purity() const { return n() > 0 ? (pos * pos + neg * neg) / n() : 0.0; }
};

struct RegressionStats {
  double n = 0, sum = 0;
  // sum^2 / n is the variance reduction up to a constant.
  double purity() const { return n > 0 ? sum * sum / n : 0.0; }
};

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

template <typename Criterion>
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const TreeParams& params, Rng& rng, Criterion criterion,
              const ColumnOrder* order)
      : X_(X), params_(params), rng_(rng), criterion_(std::move(criterion)), order_(order) {
    if (params.min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
    if (params.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  }

  DecisionTree build(std::span<const size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("cannot grow a tree on zero rows");
    if (order_) {
      if (order_->columns.size() != static_cast<size_t>(X_.cols())) {
        throw std::invalid_argument("column order does not match the feature matrix");
      }
      multiplicity_.assign(static_cast<size_t>(X_.rows()), 0);
    }
    std::vector<size_t> work(rows.begin(), rows.end());
    grow(work, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<size_t>& rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[index].value = criterion_.leaf_value(rows);

    const bool depth_ok = params_.max_depth == 0 || depth < params_.max_depth;
    if (!depth_ok || static_cast<int>(rows.size()) < params_.min_samples_split ||
        criterion_.is_pure(rows)) {
      return index;
    }
    const Split split = best_split(rows);
    if (split.feature < 0) return index;

    std::vector<size_t> left, right;
    for (size_t r : rows) {
      (X_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree_.nodes[index];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  Split best_split(const std::vector<size_t>& rows) {
    const int d = static_cast<int>(X_.cols());
    const int mtry = (params_.max_features <= 0 || params_.max_features >= d) ? d : params_.max_features;
    std::vector<int> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    if (mtry < d) rng_.shuffle(order);

    std::vector<int> candidates(order.begin(), order.begin() + mtry);
    std::sort(candidates.begin(), candidates.end());

    // A filtered walk over the presorted column costs O(N); sorting the node
    // costs O(n log n). Switch once the node is small.
    presorted_ = order_ && rows.size() * 8 >= static_cast<size_t>(X_.rows());
    if (presorted_) {
      for (size_t r : rows) ++multiplicity_[r];
    }
    Split best;
    for (int f : candidates) consider(rows, f, best);
    // Keep drawing when every candidate was constant on this node.
    for (size_t k = static_cast<size_t>(mtry); best.feature < 0 && k < order.size(); ++k) {
      consider(rows, order[k], best);
    }
    if (presorted_) {
      for (size_t r : rows) multiplicity_[r] = 0;
    }
    return best;
  }

  void sort_node(const std::vector<size_t>& rows, int feature) {
    sorted_.clear();
    if (presorted_) {
      for (uint32_t r : order_->columns[static_cast<size_t>(feature)]) {
        const double v = X_(static_cast<Eigen::Index>(r), feature);
        for (uint32_t c = multiplicity_[r]; c > 0; --c) sorted_.emplace_back(v, r);
      }
      return;
    }
    sorted_.reserve(rows.size());
    for (size_t r : rows) sorted_.emplace_back(X_(static_cast<Eigen::Index>(r), feature), r);
    std::sort(sorted_.begin(), sorted_.end());
  }

  void consider(const std::vector<size_t>& rows, int feature, Split& best) {
    sort_node(rows, feature);
    if (sorted_.front().first == sorted_.back().first) return;

    auto left = criterion_.empty();
    auto right = criterion_.empty();
    for (const auto& [v, r] : sorted_) criterion_.add(right, r);
    for (size_t i = 0; i + 1 < sorted_.size(); ++i) {
      criterion_.add(left, sorted_[i].second);
      criterion_.sub(right, sorted_[i].second);
      if (sorted_[i].first == sorted_[i + 1].first) continue;
      const double score = left.purity() + right.purity();
      if (score > best.score || (score == best.score && feature < best.feature)) {
        best.score = score;
        best.feature = feature;
        best.threshold = midpoint(sorted_[i].first, sorted_[i + 1].first);
      }
    }
  }

  const Matrix& X_;
  const TreeParams& params_;
  Rng& rng_;
  Criterion criterion_;
  const ColumnOrder* order_;
  DecisionTree tree_;
  std::vector<std::pair<double, size_t>> sorted_;
  std::vector<uint32_t> multiplicity_;
  bool presorted_ = false;
};

struct GiniCriterion {
  std::span<const int> y;

  ClassStats empty() const { return {}; }
  void add(ClassStats& s, size_t r) const { s.add(1.0, y[r]); }
  void sub(ClassStats& s, size_t r) const { s.sub(1.0, y[r]); }
  bool is_pure(const std::vector<size_t>& rows) const {
    const int first = y[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](size_t r) { return y[r] == first; });
  }
  double leaf_value(const std::vector<size_t>& rows) const {
    size_t pos = 0;
    for (size_t r : rows) pos += y[r] > 0 ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(rows.size());
  }
};

struct SquaredErrorCriterion {
  std::span<const double> target;
  std::span<const double> hessian;

  RegressionStats empty() const { return {}; }
  void add(RegressionStats& s, size_t r) const {
    s.n += 1.0;
    s.sum += target[r];
  }
  void sub(RegressionStats& s, size_t r) const {
    s.n -= 1.0;
    s.sum -= target[r];
  }
  bool is_pure(const std::vector<size_t>& rows) const {
    const double first = target[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](size_t r) { return target[r] == first; });
  }
  double leaf_value(const std::vector<size_t>& rows) const {
    double g = 0.0, h = 0.0;
    for (size_t r : rows) {
      g += target[r];
      h += hessian[r];
    }
    return g / std::max(h, 1e-12);
  }
};

}  // namespace

ColumnOrder ColumnOrder::of(const Matrix& X) {
  ColumnOrder out;
  out.columns.resize(static_cast<size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& col = out.columns[static_cast<size_t>(f)];
    col.resize(static_cast<size_t>(X.rows()));
    std::iota(col.begin(), col.end(), 0u);
    std::sort(col.begin(), col.end(), [&](uint32_t a, uint32_t b) {
      const double va = X(a, f), vb = X(b, f);
      return va < vb || (va == vb && a < b);
    });
  }
  return out;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<size_t>(x[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

double DecisionTree::predict(std::span<const double> x) const { return leaf_for(x).value; }

size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<size_t> level(nodes.size(), 0);
  size_t deepest = 0;
  // Children always follow their parent in `nodes`.
  for (size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

DecisionTree fit_classification_tree(const Matrix& X, std::span<const int> y,
                                     std::span<const size_t> rows, const TreeParams& params,
                                     Rng& rng, const ColumnOrder* order) {
  TreeBuilder builder(X, params, rng, GiniCriterion{y}, order);
  return builder.build(rows);
}

DecisionTree fit_regression_tree(const Matrix& X, std::span<const double> target,
                                 std::span<const double> hessian, std::span<const size_t> rows,
                                 const TreeParams& params, Rng& rng, const ColumnOrder* order) {
  TreeBuilder builder(X, params, rng, SquaredErrorCriterion{target, hessian}, order);
  return builder.build(rows);
}

}  // namespace covidx
