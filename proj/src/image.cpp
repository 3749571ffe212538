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

#include "covidx/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "covidx/errors.hpp"

namespace covidx {
namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

double clamp_pixel(double v) { return std::clamp(v, 0.0, 255.0); }

bool is_png(std::span<const uint8_t> b) {
  static constexpr uint8_t kSig[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  return b.size() >= sizeof(kSig) && std::equal(std::begin(kSig), std::end(kSig), b.begin());
}

bool is_jpeg(std::span<const uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

// libjpeg pads a truncated stream with gray instead of failing; require the
// end-of-image marker so truncation surfaces as an error.
bool has_jpeg_eoi(std::span<const uint8_t> b) {
  for (size_t i = b.size(); i-- > 3;) {
    if (b[i - 1] == 0xFF && b[i] == 0xD9) return true;
  }
  return false;
}

std::vector<uint8_t> encode_with(const Image& img, const std::string& ext,
                                 const std::vector<int>& params) {
  const int type = img.channels() == 3 ? CV_8UC3 : CV_8UC1;
  cv::Mat mat(img.height(), img.width(), type);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        // Image stores RGB; OpenCV expects BGR.
        const int dst_c = img.channels() == 3 ? 2 - c : c;
        row[x * img.channels() + dst_c] =
            static_cast<uint8_t>(std::lround(clamp_pixel(img.at(x, y, c))));
      }
    }
  }
  std::vector<uint8_t> out;
  if (!cv::imencode(ext, mat, out, params)) {
    throw std::runtime_error("image encoding failed for " + ext);
  }
  return out;
}

}  // namespace

Image::Image(int width, int height, int channels, std::vector<double> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw std::invalid_argument("image must have 1 or 3 channels");
  if (pixels_.size() != static_cast<size_t>(width) * height * channels) {
    throw std::invalid_argument("pixel buffer size does not match dimensions");
  }
  for (double v : pixels_) {
    if (!std::isfinite(v) || v < 0.0 || v > 255.0) {
      throw std::invalid_argument("pixel value outside [0, 255]");
    }
  }
}

Image Image::filled(int width, int height, double value, int channels) {
  return Image(width, height, channels,
               std::vector<double>(static_cast<size_t>(width) * height * channels, value));
}

void PrepConfig::validate() const {
  if (target_size <= 0) throw ConfigError("prep.target_size must be positive");
  if (median_kernel < 1 || median_kernel % 2 == 0) {
    throw ConfigError("prep.median_kernel must be an odd integer >= 1");
  }
  if (!(0.0 <= stretch_low_pct && stretch_low_pct < stretch_high_pct && stretch_high_pct <= 100.0)) {
    throw ConfigError("prep stretch percentiles must satisfy 0 <= low < high <= 100");
  }
}

Image decode_image(std::span<const uint8_t> bytes) {
  const bool png = is_png(bytes);
  const bool jpeg = is_jpeg(bytes);
  if (!png && !jpeg) throw DecodeError("payload is neither PNG nor JPEG");
  if (jpeg && !has_jpeg_eoi(bytes)) throw DecodeError("truncated JPEG stream");

  cv::Mat raw;
  try {
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1,
                      const_cast<uint8_t*>(bytes.data()));
    raw = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DecodeError(std::string("image decoding failed: ") + e.what());
  }
  if (raw.empty()) throw DecodeError("image decoding failed");

  double scale = 1.0;
  if (raw.depth() == CV_16U) {
    scale = 1.0 / 257.0;
  } else if (raw.depth() != CV_8U) {
    throw DecodeError("unsupported pixel depth");
  }
  const int ch = raw.channels();
  if (ch != 1 && ch != 3 && ch != 4) throw DecodeError("unsupported channel count");

  std::vector<double> pixels(static_cast<size_t>(raw.rows) * raw.cols);
  for (int y = 0; y < raw.rows; ++y) {
    for (int x = 0; x < raw.cols; ++x) {
      double v = 0.0;
      auto sample = [&](int c) -> double {
        if (raw.depth() == CV_8U) return raw.ptr<uint8_t>(y)[x * ch + c];
        return raw.ptr<uint16_t>(y)[x * ch + c] * scale;
      };
      if (ch == 1) {
        v = sample(0);
      } else {
        // BGR(A) order; alpha ignored.
        v = kLumaR * sample(2) + kLumaG * sample(1) + kLumaB * sample(0);
      }
      pixels[static_cast<size_t>(y) * raw.cols + x] = clamp_pixel(v);
    }
  }
  return Image(raw.cols, raw.rows, 1, std::move(pixels));
}

Image to_luminance(const Image& img) {
  if (img.channels() == 1) return img;
  std::vector<double> out(static_cast<size_t>(img.width()) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out[static_cast<size_t>(y) * img.width() + x] = clamp_pixel(
          kLumaR * img.at(x, y, 0) + kLumaG * img.at(x, y, 1) + kLumaB * img.at(x, y, 2));
    }
  }
  return Image(img.width(), img.height(), 1, std::move(out));
}

Image resize(const Image& img, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize target must be positive");
  if (width == img.width() && height == img.height()) return img;

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int src, int dst) {
    std::vector<Tap> out(dst);
    const double ratio = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
      double s = (i + 0.5) * ratio - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(src - 1));
      const int lo = static_cast<int>(std::floor(s));
      out[i] = {lo, std::min(lo + 1, src - 1), s - lo};
    }
    return out;
  };
  const auto xs = taps(img.width(), width);
  const auto ys = taps(img.height(), height);
  const int ch = img.channels();

  std::vector<double> out(static_cast<size_t>(width) * height * ch);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[x];
      for (int c = 0; c < ch; ++c) {
        // a + f * (b - a) keeps constant regions exact.
        const double p00 = img.at(tx.lo, ty.lo, c);
        const double p10 = img.at(tx.hi, ty.lo, c);
        const double p01 = img.at(tx.lo, ty.hi, c);
        const double p11 = img.at(tx.hi, ty.hi, c);
        const double top = p00 + tx.frac * (p10 - p00);
        const double bot = p01 + tx.frac * (p11 - p01);
        out[(static_cast<size_t>(y) * width + x) * ch + c] = clamp_pixel(top + ty.frac * (bot - top));
      }
    }
  }
  return Image(width, height, ch, std::move(out));
}

Image median_denoise(const Image& img, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("median kernel must be odd");
  if (kernel > std::min(img.width(), img.height())) {
    throw std::invalid_argument("median kernel larger than image");
  }
  if (kernel == 1) return img;

  const int r = kernel / 2;
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  std::vector<double> window(static_cast<size_t>(kernel) * kernel);
  std::vector<double> out(static_cast<size_t>(w) * h * ch);
  const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        size_t n = 0;
        for (int dy = -r; dy <= r; ++dy) {
          const int yy = std::clamp(y + dy, 0, h - 1);
          for (int dx = -r; dx <= r; ++dx) {
            window[n++] = img.at(std::clamp(x + dx, 0, w - 1), yy, c);
          }
        }
        std::nth_element(window.begin(), mid, window.end());
        out[(static_cast<size_t>(y) * w + x) * ch + c] = *mid;
      }
    }
  }
  return Image(w, h, ch, std::move(out));
}

double percentile(std::span<const double> values, double pct) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (rank - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Image contrast_stretch(const Image& img, double low_pct, double high_pct) {
  if (!(0.0 <= low_pct && low_pct < high_pct && high_pct <= 100.0)) {
    throw std::invalid_argument("stretch percentiles must satisfy 0 <= low < high <= 100");
  }
  const double a = percentile(img.pixels(), low_pct);
  const double b = percentile(img.pixels(), high_pct);
  if (!(b > a)) return img;

  std::vector<double> out(img.pixels().begin(), img.pixels().end());
  const double span = b - a;
  for (double& p : out) p = clamp_pixel(255.0 * (p - a) / span);
  return Image(img.width(), img.height(), img.channels(), std::move(out));
}

Image preprocess_image(const Image& decoded, const PrepConfig& cfg) {
  cfg.validate();
  Image img = resize(decoded, cfg.target_size, cfg.target_size);
  img = median_denoise(img, cfg.median_kernel);
  return contrast_stretch(img, cfg.stretch_low_pct, cfg.stretch_high_pct);
}

Image preprocess(std::span<const uint8_t> bytes, const PrepConfig& cfg) {
  return preprocess_image(decode_image(bytes), cfg);
}

std::vector<uint8_t> encode_png(const Image& img) { return encode_with(img, ".png", {}); }

std::vector<uint8_t> encode_jpeg(const Image& img, int quality) {
  return encode_with(img, ".jpg", {cv::IMWRITE_JPEG_QUALITY, quality});
}

}  // namespace covidx
