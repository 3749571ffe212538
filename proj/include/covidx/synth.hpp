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

// Synthetic texture dataset in the directory-per-class layout, for tests and
// demos. Healthy images are smooth gradients, pneumonia images carry bright
// blobs, COVID-19 images carry stripes whose period encodes severity.

#pragma once

#include <cstdint>
#include <filesystem>

#include "covidx/cascade.hpp"
#include "covidx/image.hpp"

namespace covidx {

struct SynthOptions {
  int per_class = 60;
  // Number of high-severity COVID-19 images; the rest are low.
  int covid_high = 30;
  int size = 96;
  uint64_t seed = 0;
};

Image synth_image(FinalLabel label, int size, uint64_t seed, uint64_t index);

// Writes healthy/, pneumonia/, covid/ and severity.csv under `root`.
void write_synthetic_dataset(const std::filesystem::path& root, const SynthOptions& options);

}  // namespace covidx
