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

// JSON forms of configuration and report types. Missing keys take the
// struct defaults; unknown enum spellings raise ConfigError.

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "covidx/features.hpp"
#include "covidx/image.hpp"
#include "covidx/model.hpp"
#include "covidx/validation.hpp"

namespace covidx {

void to_json(nlohmann::json& j, const PrepConfig& v);
void from_json(const nlohmann::json& j, PrepConfig& v);
void to_json(nlohmann::json& j, const ExtractorSpec& v);
void from_json(const nlohmann::json& j, ExtractorSpec& v);
void to_json(nlohmann::json& j, const SvmParams& v);
void from_json(const nlohmann::json& j, SvmParams& v);
void to_json(nlohmann::json& j, const ForestParams& v);
void from_json(const nlohmann::json& j, ForestParams& v);
void to_json(nlohmann::json& j, const BoostParams& v);
void from_json(const nlohmann::json& j, BoostParams& v);
void to_json(nlohmann::json& j, const MetricSummary& v);
void from_json(const nlohmann::json& j, MetricSummary& v);
void to_json(nlohmann::json& j, const EvalReport& v);
void from_json(const nlohmann::json& j, EvalReport& v);

// Tagged with "learner": "svm" | "forest" | "boost".
nlohmann::json learner_to_json(const LearnerConfig& config);
LearnerConfig learner_from_json(const nlohmann::json& j);

// Cartesian expansion of per-learner value lists, e.g.
//   {"svm": {"kernel": ["linear", "rbf"], "C": [1, 10], "gamma": [0.1]}}
// Linear SVM settings ignore gamma. Tree learners receive `seed`.
std::vector<LearnerConfig> expand_grid(const nlohmann::json& grid, uint64_t seed);

// Coarse default grids for all three learner families.
nlohmann::json default_grid_json();

}  // namespace covidx
