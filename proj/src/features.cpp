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

#include "covidx/features.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "covidx/errors.hpp"
#include "covidx/util.hpp"

namespace covidx {
namespace {

size_t histogram_bin(double v) {
  return static_cast<size_t>(std::clamp(std::floor(v), 0.0, 255.0));
}

class BaselineExtractor final : public Extractor {
 public:
  BaselineExtractor() : id_(kBaselineId) {}
  const std::string& id() const override { return id_; }
  size_t dim() const override { return kBaselineDim; }
  const ExtractorSpec& spec() const override { return spec_; }
  FeatureVector extract(const Image& img) const override { return baseline_extract(img); }

 private:
  std::string id_;
  ExtractorSpec spec_;
};

class OnnxExtractor final : public Extractor {
 public:
  explicit OnnxExtractor(const ExtractorSpec& spec) : spec_(spec) {
    namespace fs = std::filesystem;
    if (!fs::is_regular_file(spec.graph_path)) {
      throw GraphLoadError("graph file not found: " + spec.graph_path);
    }
    std::vector<uint8_t> bytes;
    try {
      bytes = read_file(spec.graph_path);
    } catch (const UnreadableFile& e) {
      throw GraphLoadError(e.what());
    }
    try {
      net_ = cv::dnn::readNetFromONNX(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    } catch (const cv::Exception& e) {
      throw GraphLoadError("cannot parse graph " + spec.graph_path + ": " + e.what());
    }
    if (net_.empty()) throw GraphLoadError("empty graph: " + spec.graph_path);
    net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);

    id_ = "onnx:" + fs::path(spec.graph_path).stem().string() + "@" +
          sha256_hex(bytes).substr(0, 12);

    // The output width is whatever the graph produces for a probe input.
    const cv::Mat probe = run(Image::filled(spec.input_size, spec.input_size, 0.0));
    dim_ = pooled_width(probe);
  }

  const std::string& id() const override { return id_; }
  size_t dim() const override { return dim_; }
  const ExtractorSpec& spec() const override { return spec_; }

  FeatureVector extract(const Image& img) const override {
    const cv::Mat out = run(img);
    std::vector<double> values = pool(out);
    if (values.size() != dim_) throw InferenceError("graph output width changed between calls");
    for (double v : values) {
      if (!std::isfinite(v)) throw InferenceError("graph produced a non-finite activation");
    }
    return {std::move(values), id_};
  }

 private:
  cv::Mat blob_for(const Image& img) const {
    const int s = spec_.input_size;
    const Image gray = resize(to_luminance(img), s, s);
    const bool nchw = spec_.layout == TensorLayout::kNCHW;
    const int shape_nchw[] = {1, 3, s, s};
    const int shape_nhwc[] = {1, s, s, 3};
    cv::Mat blob(4, nchw ? shape_nchw : shape_nhwc, CV_32F);
    auto* data = blob.ptr<float>();
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const double p = gray.at(x, y);
        for (int c = 0; c < 3; ++c) {
          const auto v = static_cast<float>((p - spec_.mean[c]) * spec_.scale[c]);
          const size_t idx = nchw ? (static_cast<size_t>(c) * s + y) * s + x
                                  : (static_cast<size_t>(y) * s + x) * 3 + c;
          data[idx] = v;
        }
      }
    }
    return blob;
  }

  cv::Mat run(const Image& img) const {
    cv::Mat blob = blob_for(img);
    std::lock_guard<std::mutex> lock(mu_);
    try {
      net_.setInput(blob);
      return net_.forward().clone();
    } catch (const cv::Exception& e) {
      throw InferenceError(std::string("graph execution failed: ") + e.what());
    }
  }

  size_t pooled_width(const cv::Mat& out) const {
    if (out.dims == 2) return static_cast<size_t>(out.size[1]);
    if (out.dims == 4) {
      return static_cast<size_t>(spec_.layout == TensorLayout::kNCHW ? out.size[1] : out.size[3]);
    }
    throw ShapeError("graph output must be rank 2 or rank 4, got rank " + std::to_string(out.dims));
  }

  std::vector<double> pool(const cv::Mat& out) const {
    const auto* data = out.ptr<float>();
    if (out.dims == 2) {
      return std::vector<double>(data, data + out.size[1]);
    }
    if (out.dims != 4) throw InferenceError("unexpected output rank");
    if (spec_.layout == TensorLayout::kNCHW) {
      return global_average_pool(data, out.size[1], out.size[2], out.size[3], spec_.layout);
    }
    return global_average_pool(data, out.size[3], out.size[1], out.size[2], spec_.layout);
  }

  ExtractorSpec spec_;
  std::string id_;
  size_t dim_ = 0;
  // cv::dnn::Net::forward mutates internal buffers.
  mutable std::mutex mu_;
  mutable cv::dnn::Net net_;
};

}  // namespace

ExtractorSpec ExtractorSpec::imagenet(std::string graph_path, int input_size) {
  ExtractorSpec spec;
  spec.kind = ExtractorKind::kNeural;
  spec.graph_path = std::move(graph_path);
  spec.input_size = input_size;
  spec.mean = {0.485 * 255.0, 0.456 * 255.0, 0.406 * 255.0};
  spec.scale = {1.0 / (0.229 * 255.0), 1.0 / (0.224 * 255.0), 1.0 / (0.225 * 255.0)};
  return spec;
}

void ExtractorSpec::validate() const {
  if (kind == ExtractorKind::kNeural) {
    if (graph_path.empty()) throw ConfigError("neural extractor requires a graph path");
    if (input_size <= 0) throw ConfigError("extractor input_size must be positive");
    for (double s : scale) {
      if (!std::isfinite(s) || s == 0.0) throw ConfigError("extractor scale must be finite and nonzero");
    }
  }
}

std::shared_ptr<const Extractor> load_extractor(const ExtractorSpec& spec) {
  spec.validate();
  if (spec.kind == ExtractorKind::kBaseline) return std::make_shared<BaselineExtractor>();
  return std::make_shared<OnnxExtractor>(spec);
}

std::vector<double> global_average_pool(const float* data, int channels, int height, int width,
                                        TensorLayout layout) {
  std::vector<double> out(static_cast<size_t>(channels), 0.0);
  const size_t area = static_cast<size_t>(height) * width;
  for (int c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (size_t i = 0; i < area; ++i) {
      sum += layout == TensorLayout::kNCHW ? data[static_cast<size_t>(c) * area + i]
                                           : data[i * channels + c];
    }
    out[c] = sum / static_cast<double>(area);
  }
  return out;
}

FeatureVector baseline_extract(const Image& input) {
  const Image img = to_luminance(input);
  const int w = img.width();
  const int h = img.height();
  if (w < static_cast<int>(kBaselineGrid) || h < static_cast<int>(kBaselineGrid)) {
    throw std::invalid_argument("baseline extractor needs at least 16x16 pixels");
  }

  std::vector<double> f(kBaselineDim, 0.0);
  constexpr size_t g = kBaselineGrid;
  double* means = f.data();
  double* stds = f.data() + g * g;
  double* hist = f.data() + 2 * g * g;
  double* grad = f.data() + 3 * g * g;

  for (size_t gy = 0; gy < g; ++gy) {
    const int y0 = static_cast<int>(gy * h / g);
    const int y1 = static_cast<int>((gy + 1) * h / g);
    for (size_t gx = 0; gx < g; ++gx) {
      const int x0 = static_cast<int>(gx * w / g);
      const int x1 = static_cast<int>((gx + 1) * w / g);
      const double n = static_cast<double>(y1 - y0) * (x1 - x0);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += img.at(x, y);
      const double mean = sum / n;
      double ss = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ss += (img.at(x, y) - mean) * (img.at(x, y) - mean);
      means[gy * g + gx] = mean;
      stds[gy * g + gx] = std::sqrt(ss / n);
    }
  }

  for (double p : img.pixels()) hist[histogram_bin(p)] += 1.0;
  const double total = static_cast<double>(img.pixels().size());
  for (size_t b = 0; b < 256; ++b) hist[b] /= total;

  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) grad[histogram_bin(std::abs(img.at(x + 1, y) - img.at(x, y)))] += 1.0;
  const double grad_total = static_cast<double>(h) * (w - 1);
  for (size_t b = 0; b < 256; ++b) grad[b] /= grad_total;

  return {std::move(f), kBaselineId};
}

}  // namespace covidx
