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

// Raw chest X-ray normalization: decode, resize, denoise, contrast stretch.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace covidx {

// Row-major pixel grid with values in [0, 255]. Interleaved channels.
class Image {
 public:
  Image() = default;
  // Throws std::invalid_argument when dimensions, channel count or any pixel
  // value violate the invariants.
  Image(int width, int height, int channels, std::vector<double> pixels);

  static Image filled(int width, int height, double value, int channels = 1);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return pixels_.empty(); }

  double at(int x, int y, int c = 0) const {
    return pixels_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  std::span<const double> pixels() const { return pixels_; }

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> pixels_;
};

struct PrepConfig {
  int target_size = 313;
  int median_kernel = 3;
  double stretch_low_pct = 2.0;
  double stretch_high_pct = 98.0;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const PrepConfig&) const = default;
};

// PNG or JPEG payload to single-channel luminance. Throws DecodeError.
Image decode_image(std::span<const uint8_t> bytes);

// ITU-R 601 luminance of a 3-channel image; 1-channel images pass through.
Image to_luminance(const Image& img);

// Bilinear resampling with half-pixel centers and border clamping.
Image resize(const Image& img, int width, int height);

// k x k median with clamp-to-border replication. k must be odd and no larger
// than the smaller image side.
Image median_denoise(const Image& img, int kernel);

// Linear-interpolated percentile of all pixel values, pct in [0, 100].
double percentile(std::span<const double> values, double pct);

// Maps [P_low, P_high] onto [0, 255] with clamping. A constant image (or any
// image whose two percentiles coincide) is returned unchanged.
Image contrast_stretch(const Image& img, double low_pct, double high_pct);

// decode -> resize to target_size^2 -> median_denoise -> contrast_stretch.
Image preprocess(std::span<const uint8_t> bytes, const PrepConfig& cfg);

// Same pipeline on an already decoded image.
Image preprocess_image(const Image& decoded, const PrepConfig& cfg);

// Encodes an 8-bit rendition of the image. Pixel values are rounded.
std::vector<uint8_t> encode_png(const Image& img);
std::vector<uint8_t> encode_jpeg(const Image& img, int quality = 95);

}  // namespace covidx
