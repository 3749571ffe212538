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

// End-to-end experiment driver behind `covidx train` and `covidx evaluate`.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covidx/cascade.hpp"
#include "covidx/datastore.hpp"

namespace covidx {

struct RunConfig {
  std::filesystem::path data_root;
  // Optional second dataset evaluated with the final model.
  std::optional<std::filesystem::path> external_root;
  ExtractorSpec extractor;
  PrepConfig prep;
  // Per-phase grid in expand_grid form.
  nlohmann::json grids[kPhaseCount];
  int k = 10;
  double test_fraction = 0.2;
  uint64_t seed = 0;
  std::string metric = "f1";
  std::filesystem::path bundle_path = "model.covidx";
  std::filesystem::path report_path = "report.json";

  // Throws ConfigError.
  void validate() const;
};

// Relative paths resolve against `base_dir`. A "grid" key applies to every
// phase; "grids": {"phase1": ..} overrides it per phase. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Extractor spec from a command line value: "baseline" or an ONNX graph path
// (ImageNet normalization).
ExtractorSpec extractor_from_flag(const std::string& value);

// Labelled images of one dataset, in manifest order.
struct ImageRecord {
  std::filesystem::path path;
  std::string class_name;
  FinalLabel truth = FinalLabel::kHealthy;
};
std::vector<ImageRecord> list_records(const DatasetManifest& manifest);

// Features of every record, in order.
std::vector<FeatureVector> extract_all(const Extractor& extractor, const PrepConfig& prep,
                                       const std::vector<ImageRecord>& records);

// Per-phase ROC/PR/F1 of each phase model on the images that belong to its
// task, plus the cascade's 4-class confusion matrix and the collapsed
// COVID / Pneumonia / Healthy matrix. Undefined metrics are null.
nlohmann::json evaluate_cascade(const CascadeModel& model, const std::vector<ImageRecord>& records,
                                const std::vector<FeatureVector>& features);

struct TrainOutcome {
  CascadeModel model;
  std::string digest;
  nlohmann::json report;
};

// Stratified split on the fine labels, grid search with k-fold CV per phase
// on the training portion, final fit, held-out evaluation. Writes the bundle
// and the report.
TrainOutcome run_training(const RunConfig& config);

// Loads the bundle's extractor and evaluates the bundle on a dataset root.
nlohmann::json run_evaluation(const LoadedBundle& bundle, const std::filesystem::path& data_root);

}  // namespace covidx
