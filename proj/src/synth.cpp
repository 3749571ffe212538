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

#include "covidx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covidx/rng.hpp"
#include "covidx/util.hpp"

namespace covidx {
namespace {

double gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument away from zero.
  const double u = 1.0 - rng.uniform();
  const double v = rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

}  // namespace

Image synth_image(FinalLabel label, int size, uint64_t seed, uint64_t index) {
  if (size < 16) throw std::invalid_argument("synthetic images must be at least 16 pixels wide");
  Rng rng(seed, (index << 2) | static_cast<uint64_t>(label));
  const double n = size;
  const double angle = between(rng, 0.0, 2.0 * std::numbers::pi);
  const double base = between(rng, 50.0, 80.0);
  const double slope = between(rng, 30.0, 60.0);
  const double noise = between(rng, 3.0, 6.0);

  struct Blob {
    double x, y, r, amp;
  };
  std::vector<Blob> blobs;
  double period = 0.0, phase = 0.0, amp = 0.0;
  switch (label) {
    case FinalLabel::kHealthy: break;
    case FinalLabel::kPneumonia: {
      const int count = 3 + static_cast<int>(rng.uniform_index(4));
      for (int i = 0; i < count; ++i) {
        blobs.push_back({between(rng, 0.15, 0.85) * n, between(rng, 0.15, 0.85) * n,
                         between(rng, 0.06, 0.12) * n, between(rng, 60.0, 100.0)});
      }
      break;
    }
    case FinalLabel::kCovidLow:
    case FinalLabel::kCovidHigh:
      period = label == FinalLabel::kCovidLow ? between(rng, 16.0, 20.0) : between(rng, 5.0, 7.0);
      phase = between(rng, 0.0, 2.0 * std::numbers::pi);
      amp = between(rng, 30.0, 40.0);
      break;
  }

  std::vector<double> px(static_cast<size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = x / n - 0.5;
      const double v = y / n - 0.5;
      double p = base + slope * (u * std::cos(angle) + v * std::sin(angle));
      for (const Blob& b : blobs) {
        const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
        p += b.amp * std::exp(-d2 / (2.0 * b.r * b.r));
      }
      if (period > 0.0) p += amp * std::sin(2.0 * std::numbers::pi * x / period + phase);
      p += noise * gaussian(rng);
      px[static_cast<size_t>(y) * size + x] = std::clamp(p, 0.0, 255.0);
    }
  }
  return Image(size, size, 1, std::move(px));
}

void write_synthetic_dataset(const std::filesystem::path& root, const SynthOptions& options) {
  if (options.per_class < 2) throw std::invalid_argument("per_class must be at least 2");
  if (options.covid_high < 1 || options.covid_high >= options.per_class) {
    throw std::invalid_argument("covid_high must leave at least one image of each severity");
  }
  std::filesystem::create_directories(root);
  std::ostringstream severity;
  severity << "filename,severity\n";
  auto name = [](const char* stem, int i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d.png", stem, i);
    return std::string(buf);
  };
  for (int i = 0; i < options.per_class; ++i) {
    write_file(root / "healthy" / name("healthy", i),
               encode_png(synth_image(FinalLabel::kHealthy, options.size, options.seed, i)));
    write_file(root / "pneumonia" / name("pneumonia", i),
               encode_png(synth_image(FinalLabel::kPneumonia, options.size, options.seed, i)));
    const bool high = i < options.covid_high;
    const FinalLabel label = high ? FinalLabel::kCovidHigh : FinalLabel::kCovidLow;
    const std::string file = name("covid", i);
    write_file(root / "covid" / file, encode_png(synth_image(label, options.size, options.seed, i)));
    severity << file << ',' << (high ? "high" : "low") << '\n';
  }
  write_file(root / "severity.csv", severity.str());
}

}  // namespace covidx
