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

// Fixed-length feature vectors from preprocessed images. Two extractor
// families: a built-in handcrafted baseline and frozen ONNX backbones whose
// final feature map is global-average pooled.

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "covidx/image.hpp"

namespace covidx {

struct FeatureVector {
  std::vector<double> values;
  std::string extractor_id;
};

enum class ExtractorKind { kBaseline, kNeural };
enum class TensorLayout { kNCHW, kNHWC };

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::kBaseline;
  std::string graph_path;
  int input_size = 224;
  // Network input is (pixel - mean[c]) * scale[c] with pixels in [0, 255].
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  TensorLayout layout = TensorLayout::kNCHW;

  // ImageNet statistics in the torchvision convention.
  static ExtractorSpec imagenet(std::string graph_path, int input_size = 224);

  // Throws ConfigError. Graph existence is checked by load_extractor.
  void validate() const;
};

inline constexpr size_t kBaselineGrid = 16;
inline constexpr size_t kBaselineDim = 1024;
inline constexpr const char* kBaselineId = "baseline-v1";

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual const std::string& id() const = 0;
  virtual size_t dim() const = 0;
  virtual const ExtractorSpec& spec() const = 0;
  // Thread-safe.
  virtual FeatureVector extract(const Image& img) const = 0;
};

// Throws GraphLoadError, ShapeError, ConfigError.
std::shared_ptr<const Extractor> load_extractor(const ExtractorSpec& spec);

// 16x16 patch means | patch stds | 256-bin intensity histogram |
// 256-bin histogram of |horizontal differences|. Histograms are normalized.
FeatureVector baseline_extract(const Image& img);

// Average over spatial positions of a rank-4 activation, per channel.
std::vector<double> global_average_pool(const float* data, int channels, int height, int width,
                                        TensorLayout layout);

}  // namespace covidx
