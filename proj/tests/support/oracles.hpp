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

// Independent reference computations for the test suites. Written for
// clarity over speed; none of them call into the library under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

namespace covidx::oracle {

using Rows = std::vector<std::vector<double>>;

// Bilinear sample of a single-channel image at output pixel (ox, oy) for a
// resize from (sw, sh) to (dw, dh), half-pixel centers, border clamp.
inline double bilinear(const std::vector<double>& src, int sw, int sh, int dw, int dh, int ox, int oy) {
  auto coord = [](int o, int s, int d) {
    double c = (o + 0.5) * static_cast<double>(s) / d - 0.5;
    if (c < 0) c = 0;
    if (c > s - 1) c = s - 1;
    return c;
  };
  const double cx = coord(ox, sw, dw), cy = coord(oy, sh, dh);
  const int x0 = static_cast<int>(cx), y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, sw - 1), y1 = std::min(y0 + 1, sh - 1);
  const double fx = cx - x0, fy = cy - y0;
  auto p = [&](int x, int y) { return src[static_cast<size_t>(y) * sw + x]; };
  const double v = (1 - fx) * (1 - fy) * p(x0, y0) + fx * (1 - fy) * p(x1, y0) + (1 - fx) * fy * p(x0, y1) +
                   fx * fy * p(x1, y1);
  return std::clamp(v, 0.0, 255.0);
}

// Full-sort median of the k x k clamp-to-border window.
inline double median_at(const std::vector<double>& src, int w, int h, int k, int x, int y) {
  std::vector<double> win;
  for (int dy = -k / 2; dy <= k / 2; ++dy) {
    for (int dx = -k / 2; dx <= k / 2; ++dx) {
      const int xx = std::clamp(x + dx, 0, w - 1), yy = std::clamp(y + dy, 0, h - 1);
      win.push_back(src[static_cast<size_t>(yy) * w + xx]);
    }
  }
  std::sort(win.begin(), win.end());
  return win[win.size() / 2];
}

// Fraction of (positive, negative) pairs ranked correctly, ties count half.
inline double pair_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0, pairs = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      if (y[j] == 1) continue;
      pairs += 1;
      good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return good / pairs;
}

// Walks every distinct score threshold from the top, recounting TP/FP from
// scratch: sum of (recall gain) x precision.
inline double walked_ap(const std::vector<double>& s, const std::vector<int>& y) {
  std::set<double, std::greater<>> thresholds(s.begin(), s.end());
  const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  double ap = 0, prev_recall = 0;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] == 1 ? tp : fp) += 1;
    }
    const double recall = tp / pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

// Column standardization with population std; constant columns keep std 1.
struct Standardized {
  Rows rows;
  std::vector<double> mean, std;
  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> out(x.size());
    for (size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / std[j];
    return out;
  }
};

inline Standardized standardize(const Rows& X) {
  Standardized s;
  const size_t n = X.size(), d = X[0].size();
  s.mean.assign(d, 0);
  s.std.assign(d, 0);
  for (size_t j = 0; j < d; ++j) {
    bool constant = true;
    for (size_t i = 0; i < n; ++i) {
      s.mean[j] += X[i][j];
      constant = constant && X[i][j] == X[0][j];
    }
    s.mean[j] /= n;
    if (constant) {
      s.mean[j] = X[0][j];
      s.std[j] = 1;
      continue;
    }
    double var = 0;
    for (size_t i = 0; i < n; ++i) var += (X[i][j] - s.mean[j]) * (X[i][j] - s.mean[j]);
    s.std[j] = std::sqrt(var / n);
  }
  for (const auto& r : X) s.rows.push_back(s.apply(r));
  return s;
}

// Soft-margin SVM dual solved by accelerated projected gradient. The
// projection onto {0 <= a <= C, y.a = 0} bisects on the shift along y.
struct DualOracle {
  std::vector<double> alpha;
  double bias = 0;
  Rows X;  // standardized training rows
  std::vector<int> y;
  bool rbf = false;
  double gamma = 0;

  double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
    double v = 0;
    if (rbf) {
      for (size_t j = 0; j < a.size(); ++j) v += (a[j] - b[j]) * (a[j] - b[j]);
      return std::exp(-gamma * v);
    }
    for (size_t j = 0; j < a.size(); ++j) v += a[j] * b[j];
    return v;
  }
  double decision(const std::vector<double>& x_std) const {
    double f = bias;
    for (size_t i = 0; i < X.size(); ++i) f += alpha[i] * y[i] * kernel(X[i], x_std);
    return f;
  }
};

inline std::vector<double> project_box_hyperplane(const std::vector<double>& v, const std::vector<int>& y, double C) {
  auto clipped = [&](double nu) {
    std::vector<double> a(v.size());
    for (size_t i = 0; i < v.size(); ++i) a[i] = std::clamp(v[i] - nu * y[i], 0.0, C);
    return a;
  };
  auto balance = [&](double nu) {
    const auto a = clipped(nu);
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += y[i] * a[i];
    return s;
  };
  // balance(nu) is non-increasing in nu.
  double lo = -1, hi = 1;
  while (balance(lo) < 0) lo *= 2;
  while (balance(hi) > 0) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (balance(mid) > 0 ? lo : hi) = mid;
  }
  return clipped(0.5 * (lo + hi));
}

inline DualOracle solve_svm_dual(const Rows& raw, const std::vector<int>& y, double C, bool rbf, double gamma,
                                 int iterations = 200000) {
  DualOracle o;
  o.X = standardize(raw).rows;
  o.y = y;
  o.rbf = rbf;
  o.gamma = gamma;
  const size_t n = raw.size();
  std::vector<std::vector<double>> Q(n, std::vector<double>(n));
  double frob = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      Q[i][j] = y[i] * y[j] * o.kernel(o.X[i], o.X[j]);
      frob += Q[i][j] * Q[i][j];
    }
  }
  const double step = 1.0 / std::max(std::sqrt(frob), 1e-12);
  std::vector<double> a(n, 0.0), prev = a, z = a;
  double t = 1;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
      double g = -1;
      for (size_t j = 0; j < n; ++j) g += Q[i][j] * z[j];
      v[i] = z[i] - step * g;
    }
    prev = a;
    a = project_box_hyperplane(v, y, C);
    const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    double moved = 0;
    for (size_t i = 0; i < n; ++i) {
      z[i] = a[i] + (t - 1) / t_next * (a[i] - prev[i]);
      moved = std::max(moved, std::abs(a[i] - prev[i]));
    }
    t = t_next;
    if (it > 1000 && moved < 1e-13) break;
  }
  o.alpha = a;

  // Bias: average over free vectors, else the midpoint of the KKT interval.
  const double eps = 1e-4 * C;
  double free_sum = 0;
  int free_count = 0;
  double lower = -std::numeric_limits<double>::infinity(), upper = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    double s = 0;
    for (size_t j = 0; j < n; ++j) s += a[j] * y[j] * o.kernel(o.X[j], o.X[i]);
    if (a[i] > eps && a[i] < C - eps) {
      free_sum += y[i] - s;
      ++free_count;
    } else if (a[i] <= eps) {
      if (y[i] > 0) lower = std::max(lower, 1 - s);
      else upper = std::min(upper, -1 - s);
    } else {
      if (y[i] > 0) upper = std::min(upper, 1 - s);
      else lower = std::max(lower, -1 - s);
    }
  }
  o.bias = free_count > 0 ? free_sum / free_count : 0.5 * (lower + upper);
  return o;
}

}  // namespace covidx::oracle
