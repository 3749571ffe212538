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

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "covidx/errors.hpp"
#include "covidx/image.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace covidx {
namespace {

using testing::random_image;

std::vector<double> as_vector(const Image& img) { return {img.pixels().begin(), img.pixels().end()}; }

std::vector<uint8_t> cv_encode(const cv::Mat& m, const std::string& ext, std::vector<int> params = {}) {
  std::vector<uint8_t> out;
  cv::imencode(ext, m, out, params);
  return out;
}

TEST(ImageTest, ConstructorRejectsInvalidInput) {
  EXPECT_THROW(Image(0, 2, 1, {}), std::invalid_argument);
  EXPECT_THROW(Image(2, 2, 2, std::vector<double>(8, 0)), std::invalid_argument);
  EXPECT_THROW(Image(2, 1, 1, {0, 256}), std::invalid_argument);
  EXPECT_THROW(Image(2, 1, 1, {0, -1}), std::invalid_argument);
  EXPECT_THROW(Image(2, 1, 1, {0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(Image(2, 2, 1, {0, 1, 2}), std::invalid_argument);
  EXPECT_NO_THROW(Image(2, 1, 3, {0, 1, 2, 3, 4, 255}));
}

TEST(PrepConfigTest, Validation) {
  EXPECT_NO_THROW(PrepConfig{}.validate());
  PrepConfig c;
  c.median_kernel = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.stretch_low_pct = 50;
  c.stretch_high_pct = 50;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.target_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(DecodeTest, BlackPng) {
  const Image img = decode_image(encode_png(Image::filled(8, 8, 0.0)));
  EXPECT_EQ(img.width(), 8);
  EXPECT_EQ(img.height(), 8);
  EXPECT_EQ(img.channels(), 1);
  for (double p : img.pixels()) EXPECT_EQ(p, 0.0);
}

TEST(DecodeTest, ConstantJpegWithinTolerance) {
  const Image img = decode_image(encode_jpeg(Image::filled(24, 16, 200.0)));
  EXPECT_EQ(img.width(), 24);
  EXPECT_EQ(img.height(), 16);
  for (double p : img.pixels()) EXPECT_NEAR(p, 200.0, 2.0);
}

TEST(DecodeTest, ColorConvertsToLuminance) {
  Rng rng(3);
  const Image rgb = random_image(rng, 5, 4, 3);
  const Image img = decode_image(encode_png(rgb));
  ASSERT_EQ(img.channels(), 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      const double expected = 0.299 * rgb.at(x, y, 0) + 0.587 * rgb.at(x, y, 1) + 0.114 * rgb.at(x, y, 2);
      EXPECT_NEAR(img.at(x, y), expected, 1e-9);
    }
  }
}

TEST(DecodeTest, AlphaChannelIgnored) {
  cv::Mat bgra(2, 2, CV_8UC4, cv::Scalar(10, 20, 30, 0));
  const Image img = decode_image(cv_encode(bgra, ".png"));
  EXPECT_NEAR(img.at(0, 0), 0.299 * 30 + 0.587 * 20 + 0.114 * 10, 1e-9);
}

TEST(DecodeTest, SixteenBitScaledToEightBitRange) {
  cv::Mat m(2, 2, CV_16UC1, cv::Scalar(65535));
  m.at<uint16_t>(0, 0) = 0;
  const Image img = decode_image(cv_encode(m, ".png"));
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_NEAR(img.at(1, 1), 255.0, 1e-9);
}

TEST(DecodeTest, MalformedPayloadsRaise) {
  const auto png = encode_png(Image::filled(32, 32, 90.0));
  const auto jpeg = encode_jpeg(Image::filled(32, 32, 90.0));
  EXPECT_THROW(decode_image({}), DecodeError);
  const std::string text = "just some text, not an image";
  EXPECT_THROW(decode_image({reinterpret_cast<const uint8_t*>(text.data()), text.size()}), DecodeError);
  EXPECT_THROW(decode_image(std::span(png).first(png.size() / 2)), DecodeError);
  EXPECT_THROW(decode_image(std::span(jpeg).first(jpeg.size() / 2)), DecodeError);
  EXPECT_THROW(decode_image(std::span(png).first(8)), DecodeError);
  try {
    decode_image(std::span(png).first(20));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.code(), "decode_failed");
  }
}

TEST(ResizeTest, IdentityAtSameSize) {
  Rng rng(1);
  const Image img = random_image(rng, 313, 313);
  EXPECT_EQ(resize(img, 313, 313), img);
}

TEST(ResizeTest, ConstantPreserved) {
  const Image img = Image::filled(2, 2, 128.0);
  for (int w : {1, 2, 3, 7, 313}) {
    for (int h : {1, 5, 64}) {
      const Image out = resize(img, w, h);
      ASSERT_EQ(out.width(), w);
      ASSERT_EQ(out.height(), h);
      for (double p : out.pixels()) ASSERT_EQ(p, 128.0);
    }
  }
}

TEST(ResizeTest, TwoPixelRowMatchesScalarOracle) {
  const Image img(2, 1, 1, {0.0, 255.0});
  const Image out = resize(img, 4, 1);
  const std::vector<double> src{0.0, 255.0};
  // Half-pixel centers: source coords -0.25, 0.25, 0.75, 1.25 -> 0, 63.75, 191.25, 255.
  const double expected[] = {0.0, 63.75, 191.25, 255.0};
  for (int x = 0; x < 4; ++x) {
    EXPECT_NEAR(out.at(x, 0), oracle::bilinear(src, 2, 1, 4, 1, x, 0), 1e-12);
    EXPECT_NEAR(out.at(x, 0), expected[x], 1e-12);
  }
}

TEST(ResizeTest, RandomImagesMatchScalarOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int sw = 1 + static_cast<int>(rng.uniform_index(40)), sh = 1 + static_cast<int>(rng.uniform_index(40));
    const int dw = 1 + static_cast<int>(rng.uniform_index(60)), dh = 1 + static_cast<int>(rng.uniform_index(60));
    const Image img = random_image(rng, sw, sh);
    const Image out = resize(img, dw, dh);
    const auto src = as_vector(img);
    for (int y = 0; y < dh; ++y) {
      for (int x = 0; x < dw; ++x) {
        ASSERT_NEAR(out.at(x, y), oracle::bilinear(src, sw, sh, dw, dh, x, y), 1e-9);
      }
    }
  }
}

TEST(ResizeTest, RejectsNonPositiveTarget) {
  EXPECT_THROW(resize(Image::filled(2, 2, 0.0), 0, 3), std::invalid_argument);
}

TEST(MedianTest, ConstantUnchanged) {
  const Image img = Image::filled(9, 7, 42.0);
  EXPECT_EQ(median_denoise(img, 3), img);
  EXPECT_EQ(median_denoise(img, 7), img);
}

TEST(MedianTest, SaltPixelRemovedAndIdempotent) {
  std::vector<double> px(25, 0.0);
  px[12] = 255.0;
  const Image img(5, 5, 1, px);
  const Image once = median_denoise(img, 3);
  EXPECT_EQ(once.at(2, 2), 0.0);
  EXPECT_EQ(median_denoise(once, 3), once);
}

TEST(MedianTest, MatchesFullSortOracleAndStaysInRange) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 5 + static_cast<int>(rng.uniform_index(20)), h = 5 + static_cast<int>(rng.uniform_index(20));
    const int k = trial % 2 == 0 ? 3 : 5;
    const Image img = random_image(rng, w, h);
    const Image out = median_denoise(img, k);
    const auto src = as_vector(img);
    const auto [lo, hi] = std::minmax_element(src.begin(), src.end());
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        ASSERT_EQ(out.at(x, y), oracle::median_at(src, w, h, k, x, y));
        ASSERT_GE(out.at(x, y), *lo);
        ASSERT_LE(out.at(x, y), *hi);
      }
    }
  }
}

TEST(MedianTest, RejectsBadKernel) {
  const Image img = Image::filled(4, 4, 1.0);
  EXPECT_THROW(median_denoise(img, 2), std::invalid_argument);
  EXPECT_THROW(median_denoise(img, 5), std::invalid_argument);
  EXPECT_EQ(median_denoise(img, 1), img);
}

TEST(PercentileTest, LinearInterpolation) {
  const std::vector<double> v{40, 10, 30, 20};
  EXPECT_EQ(percentile(v, 0), 10);
  EXPECT_EQ(percentile(v, 100), 40);
  EXPECT_DOUBLE_EQ(percentile(v, 50), 25);
  EXPECT_DOUBLE_EQ(percentile(v, 2), 10.6);
  EXPECT_THROW(percentile({}, 50), std::invalid_argument);
}

TEST(StretchTest, ConstantUnchanged) {
  const Image img = Image::filled(6, 6, 77.0);
  EXPECT_EQ(contrast_stretch(img, 2, 98), img);
}

TEST(StretchTest, FullRangeIdentity) {
  Rng rng(2);
  std::vector<double> px(64);
  for (double& p : px) p = static_cast<double>(rng.uniform_index(256));
  px[0] = 0;
  px[1] = 255;
  const Image img(8, 8, 1, px);
  const Image out = contrast_stretch(img, 0, 100);
  for (size_t i = 0; i < px.size(); ++i) EXPECT_NEAR(out.pixels()[i], px[i], 1e-12);
}

TEST(StretchTest, TwoValuedImage) {
  const Image img(2, 2, 1, {50, 100, 100, 50});
  const Image out = contrast_stretch(img, 0, 100);
  EXPECT_EQ(out.at(0, 0), 0.0);
  EXPECT_EQ(out.at(1, 0), 255.0);
  EXPECT_EQ(out.at(0, 1), 255.0);
  EXPECT_EQ(out.at(1, 1), 0.0);
}

TEST(StretchTest, MonotoneNonDecreasing) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Image img = random_image(rng, 16, 16);
    const Image out = contrast_stretch(img, 2, 98);
    std::vector<std::pair<double, double>> pairs;
    for (size_t i = 0; i < img.pixels().size(); ++i) pairs.emplace_back(img.pixels()[i], out.pixels()[i]);
    std::sort(pairs.begin(), pairs.end());
    for (size_t i = 1; i < pairs.size(); ++i) ASSERT_LE(pairs[i - 1].second, pairs[i].second);
  }
}

TEST(PreprocessTest, DefaultOutputIs313Square) {
  Rng rng(4);
  const auto bytes = encode_png(random_image(rng, 64, 40));
  const Image out = preprocess(bytes, {});
  EXPECT_EQ(out.width(), 313);
  EXPECT_EQ(out.height(), 313);
}

TEST(PreprocessTest, ConstantInputStaysConstant) {
  const Image out = preprocess(encode_png(Image::filled(20, 30, 123.0)), {});
  for (double p : out.pixels()) ASSERT_EQ(p, 123.0);
}

TEST(PreprocessTest, DeterministicAndComposedInOrder) {
  Rng rng(6);
  const auto bytes = encode_jpeg(random_image(rng, 50, 50, 3));
  PrepConfig cfg;
  cfg.target_size = 64;
  const Image a = preprocess(bytes, cfg);
  const Image b = preprocess(bytes, cfg);
  EXPECT_EQ(a, b);
  const Image manual =
      contrast_stretch(median_denoise(resize(decode_image(bytes), 64, 64), 3), cfg.stretch_low_pct,
                       cfg.stretch_high_pct);
  EXPECT_EQ(a, manual);
}

TEST(LuminanceTest, GrayPassesThrough) {
  Rng rng(9);
  const Image gray = random_image(rng, 4, 4);
  EXPECT_EQ(to_luminance(gray), gray);
  const Image rgb(1, 1, 3, {100, 50, 200});
  EXPECT_NEAR(to_luminance(rgb).at(0, 0), 0.299 * 100 + 0.587 * 50 + 0.114 * 200, 1e-12);
}

}  // namespace
}  // namespace covidx
