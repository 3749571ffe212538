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

// Three staged binary decisions: healthy vs unhealthy, then pneumonia vs
// COVID-19 for unhealthy images, then low vs high severity for COVID-19.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covidx/dataset.hpp"
#include "covidx/features.hpp"
#include "covidx/image.hpp"
#include "covidx/model.hpp"
#include "covidx/validation.hpp"

namespace covidx {

enum class FinalLabel { kHealthy = 0, kPneumonia = 1, kCovidLow = 2, kCovidHigh = 3 };
inline constexpr std::array<FinalLabel, 4> kFinalLabels = {
    FinalLabel::kHealthy, FinalLabel::kPneumonia, FinalLabel::kCovidLow, FinalLabel::kCovidHigh};

// "Healthy", "Pneumonia", "COVID-Low", "COVID-High".
std::string to_string(FinalLabel label);
std::optional<FinalLabel> parse_final_label(std::string_view text);

enum class Severity { kLow, kHigh };

enum class Phase { kHealth = 0, kCovid = 1, kSeverity = 2 };
inline constexpr int kPhaseCount = 3;

// Short task name and the labels of the -1 / +1 side of each phase.
struct PhaseInfo {
  const char* task;
  const char* negative;
  const char* positive;
};
const PhaseInfo& phase_info(int phase);

// Feature rows for one image class.
struct FeatureSet {
  Matrix X;
  std::vector<std::string> ids;

  size_t size() const { return ids.size(); }
};

FeatureSet make_feature_set(std::span<const FeatureVector> features, std::vector<std::string> ids);

struct PhaseSummary {
  std::string selected;  // describe() of the chosen setting
  EvalReport cv;         // CV report of the chosen setting
  // Best CV report per learner family present in the grid.
  std::map<std::string, EvalReport> per_learner;
};

struct CascadeModel {
  std::array<TrainedModel, kPhaseCount> phases;
  std::array<PhaseSummary, kPhaseCount> summaries;
  ExtractorSpec extractor_spec;
  std::string extractor_id;
  PrepConfig prep;
  std::string prep_digest;
};

struct CascadeResult {
  FinalLabel final_label = FinalLabel::kHealthy;
  double phase1_score = 0.0;
  std::optional<double> phase2_score;
  std::optional<double> phase3_score;

  bool operator==(const CascadeResult&) const = default;
};

struct CascadeSpec {
  ExtractorSpec extractor_spec;
  std::string extractor_id;
  PrepConfig prep;
  std::array<std::vector<LearnerConfig>, kPhaseCount> grids;
  int k = 10;
  uint64_t seed = 0;
  std::string metric = "f1";
};

// SHA-256 of the canonical JSON form of the preprocessing configuration.
std::string prep_digest(const PrepConfig& prep);

// Phase 1: healthy (-1) vs pneumonia + covid (+1). Phase 2: pneumonia (-1)
// vs covid (+1). Phase 3: covid low (-1) vs covid high (+1), restricted to the
// covid rows that carry a severity. `severity` is aligned with `covid`.
// Throws ClassTooSmall when a phase would lack a class.
std::array<LabeledDataset, kPhaseCount> build_phase_datasets(const FeatureSet& healthy,
                                                            const FeatureSet& pneumonia,
                                                            const FeatureSet& covid,
                                                            std::span<const std::optional<Severity>> severity);

// Independent grid search and final fit per phase.
CascadeModel cascade_train(const FeatureSet& healthy, const FeatureSet& pneumonia,
                           const FeatureSet& covid, std::span<const std::optional<Severity>> severity,
                           const CascadeSpec& spec);

CascadeResult cascade_predict_features(const CascadeModel& model, std::span<const double> features);

// Preprocess with the model's PrepConfig, extract, then run the phases.
// Throws DecodeError and ExtractorMismatch.
CascadeResult cascade_predict(const CascadeModel& model, const Extractor& extractor,
                              std::span<const uint8_t> image_bytes);

FeatureVector extract_features(const Extractor& extractor, const PrepConfig& prep,
                               std::span<const uint8_t> image_bytes);

// Fine-grained ground truth of an image, for 4-class evaluation.
FinalLabel truth_label(const std::string& class_name, std::optional<Severity> severity);

}  // namespace covidx
