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

// A small cascade trained end to end on synthetic images with the baseline
// extractor.

#pragma once

#include <filesystem>

#include "covidx/pipeline.hpp"
#include "covidx/synth.hpp"

namespace covidx::testing {

inline RunConfig small_run_config(const std::filesystem::path& dir, int per_class = 20, uint64_t seed = 3) {
  SynthOptions synth;
  synth.per_class = per_class;
  synth.covid_high = per_class / 2;
  synth.size = 64;
  synth.seed = seed;
  write_synthetic_dataset(dir / "data", synth);

  RunConfig config;
  config.data_root = dir / "data";
  config.prep.target_size = 64;
  for (auto& g : config.grids) g = {{"svm", {{"kernel", "linear"}, {"C", {0.1, 1.0}}}}};
  config.k = 3;
  config.seed = seed;
  config.bundle_path = dir / "model.covidx";
  config.report_path = dir / "report.json";
  return config;
}

}  // namespace covidx::testing
