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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <thread>

#include "covidx/errors.hpp"
#include "covidx/features.hpp"
#include "support/fixtures.hpp"

namespace covidx {
namespace {

using testing::data_path;
using testing::random_image;

double block_sum(const std::vector<double>& f, size_t block) {
  return std::accumulate(f.begin() + static_cast<std::ptrdiff_t>(block * 256),
                         f.begin() + static_cast<std::ptrdiff_t>((block + 1) * 256), 0.0);
}

ExtractorSpec onnx_spec(const std::string& name) {
  ExtractorSpec s;
  s.kind = ExtractorKind::kNeural;
  s.graph_path = data_path(name).string();
  s.input_size = 32;
  s.mean = {128, 128, 128};
  s.scale = {1 / 64.0, 1 / 64.0, 1 / 64.0};
  return s;
}

TEST(BaselineTest, ConstantImage) {
  const FeatureVector f = baseline_extract(Image::filled(64, 48, 128.0));
  ASSERT_EQ(f.values.size(), kBaselineDim);
  EXPECT_EQ(f.extractor_id, kBaselineId);
  for (size_t i = 0; i < 256; ++i) {
    EXPECT_EQ(f.values[i], 128.0);
    EXPECT_EQ(f.values[256 + i], 0.0);
  }
  EXPECT_EQ(f.values[512 + 128], 1.0);
  EXPECT_EQ(f.values[768 + 0], 1.0);
  EXPECT_DOUBLE_EQ(block_sum(f.values, 2), 1.0);
  EXPECT_DOUBLE_EQ(block_sum(f.values, 3), 1.0);
}

TEST(BaselineTest, HistogramsNormalized) {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureVector f = baseline_extract(random_image(rng, 40 + trial * 7, 33 + trial));
    EXPECT_NEAR(block_sum(f.values, 2), 1.0, 1e-9);
    EXPECT_NEAR(block_sum(f.values, 3), 1.0, 1e-9);
  }
}

TEST(BaselineTest, HalfAndHalfSplitsPatchMeans) {
  std::vector<double> px(64 * 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) px[static_cast<size_t>(y) * 64 + x] = x < 32 ? 0.0 : 255.0;
  const FeatureVector f = baseline_extract(Image(64, 64, 1, px));
  for (size_t gy = 0; gy < 16; ++gy) {
    for (size_t gx = 0; gx < 16; ++gx) EXPECT_EQ(f.values[gy * 16 + gx], gx < 8 ? 0.0 : 255.0);
  }
}

TEST(BaselineTest, MatchesDirectPatchArithmetic) {
  Rng rng(7);
  const int w = 50, h = 37;
  const Image img = random_image(rng, w, h);
  const FeatureVector f = baseline_extract(img);
  for (int gy = 0; gy < 16; ++gy) {
    for (int gx = 0; gx < 16; ++gx) {
      const int x0 = gx * w / 16, x1 = (gx + 1) * w / 16, y0 = gy * h / 16, y1 = (gy + 1) * h / 16;
      double s = 0, s2 = 0, n = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          s += img.at(x, y);
          s2 += img.at(x, y) * img.at(x, y);
          n += 1;
        }
      }
      const double mean = s / n;
      EXPECT_NEAR(f.values[gy * 16 + gx], mean, 1e-9);
      EXPECT_NEAR(f.values[256 + gy * 16 + gx], std::sqrt(std::max(0.0, s2 / n - mean * mean)), 1e-6);
    }
  }
  std::vector<double> hist(256, 0), grad(256, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      hist[static_cast<size_t>(img.at(x, y))] += 1.0 / (w * h);
      if (x + 1 < w) grad[static_cast<size_t>(std::abs(img.at(x + 1, y) - img.at(x, y)))] += 1.0 / ((w - 1) * h);
    }
  }
  for (size_t b = 0; b < 256; ++b) {
    EXPECT_NEAR(f.values[512 + b], hist[b], 1e-12);
    EXPECT_NEAR(f.values[768 + b], grad[b], 1e-12);
  }
}

TEST(BaselineTest, ShiftCovariantMeans) {
  Rng rng(3);
  std::vector<double> px(32 * 32);
  for (double& p : px) p = static_cast<double>(rng.uniform_index(200));
  std::vector<double> shifted = px;
  for (double& p : shifted) p += 40.0;
  const FeatureVector a = baseline_extract(Image(32, 32, 1, px));
  const FeatureVector b = baseline_extract(Image(32, 32, 1, shifted));
  for (size_t i = 0; i < 256; ++i) {
    EXPECT_NEAR(b.values[i], a.values[i] + 40.0, 1e-9);
    EXPECT_NEAR(b.values[256 + i], a.values[256 + i], 1e-9);
  }
}

TEST(BaselineTest, RejectsTinyImages) {
  EXPECT_THROW(baseline_extract(Image::filled(15, 40, 0.0)), std::invalid_argument);
}

TEST(LoadExtractorTest, Baseline) {
  const auto ex = load_extractor(ExtractorSpec{});
  EXPECT_EQ(ex->dim(), kBaselineDim);
  EXPECT_EQ(ex->id(), kBaselineId);
}

TEST(LoadExtractorTest, ErrorsForMissingCorruptAndBadRank) {
  EXPECT_THROW(load_extractor(onnx_spec("does_not_exist.onnx")), GraphLoadError);
  EXPECT_THROW(load_extractor(onnx_spec("corrupt.onnx")), GraphLoadError);
  EXPECT_THROW(load_extractor(onnx_spec("bad_rank3.onnx")), ShapeError);
}

TEST(LoadExtractorTest, SpecValidation) {
  ExtractorSpec s = onnx_spec("conv_rank4.onnx");
  s.graph_path.clear();
  EXPECT_THROW(load_extractor(s), ConfigError);
  s = onnx_spec("conv_rank4.onnx");
  s.input_size = 0;
  EXPECT_THROW(load_extractor(s), ConfigError);
}

TEST(OnnxExtractorTest, Rank4OutputIsPooled) {
  const auto ex = load_extractor(onnx_spec("conv_rank4.onnx"));
  EXPECT_EQ(ex->dim(), 4u);
  EXPECT_EQ(ex->id().rfind("onnx:conv_rank4@", 0), 0u);
  EXPECT_EQ(ex->id().size(), std::string("onnx:conv_rank4@").size() + 12);
  Rng rng(2);
  const Image img = random_image(rng, 50, 40);
  const FeatureVector a = ex->extract(img);
  const FeatureVector b = ex->extract(img);
  ASSERT_EQ(a.values.size(), ex->dim());
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.extractor_id, ex->id());
}

TEST(OnnxExtractorTest, GraphPoolingAgreesWithHostPooling) {
  const auto rank4 = load_extractor(onnx_spec("conv_rank4.onnx"));
  const auto rank2 = load_extractor(onnx_spec("gap_rank2.onnx"));
  EXPECT_EQ(rank2->dim(), 4u);
  Rng rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const Image img = random_image(rng, 32, 32);
    const auto a = rank4->extract(img).values;
    const auto b = rank2->extract(img).values;
    for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-4);
  }
}

TEST(OnnxExtractorTest, DistinguishesBlackAndWhite) {
  const auto ex = load_extractor(onnx_spec("conv_rank4.onnx"));
  const auto a = ex->extract(Image::filled(32, 32, 0.0)).values;
  const auto b = ex->extract(Image::filled(32, 32, 255.0)).values;
  double dist = 0;
  for (size_t i = 0; i < a.size(); ++i) dist += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_GT(dist, 0.0);
}

TEST(OnnxExtractorTest, ConcurrentCallsMatchSerial) {
  const auto ex = load_extractor(onnx_spec("conv_rank4.onnx"));
  Rng rng(4);
  std::vector<Image> images;
  for (int i = 0; i < 8; ++i) images.push_back(random_image(rng, 40, 40));
  std::vector<std::vector<double>> serial, parallel(images.size());
  for (const Image& img : images) serial.push_back(ex->extract(img).values);
  std::vector<std::thread> threads;
  for (size_t i = 0; i < images.size(); ++i) {
    threads.emplace_back([&, i] { parallel[i] = ex->extract(images[i]).values; });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(serial, parallel);
}

TEST(PoolingTest, LayoutsAgree) {
  // 2 channels, 2x3 spatial.
  const float nchw[] = {1, 2, 3, 4, 5, 6, 10, 20, 30, 40, 50, 60};
  const float nhwc[] = {1, 10, 2, 20, 3, 30, 4, 40, 5, 50, 6, 60};
  const auto a = global_average_pool(nchw, 2, 2, 3, TensorLayout::kNCHW);
  const auto b = global_average_pool(nhwc, 2, 2, 3, TensorLayout::kNHWC);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_DOUBLE_EQ(a[0], 3.5);
  EXPECT_DOUBLE_EQ(a[1], 35.0);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace covidx
