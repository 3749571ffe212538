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

// Uniform front for the three learner families.

#pragma once

#include <span>
#include <string>
#include <variant>

#include "covidx/dataset.hpp"
#include "covidx/ensemble.hpp"
#include "covidx/svm.hpp"

namespace covidx {

using LearnerConfig = std::variant<SvmParams, ForestParams, BoostParams>;
using TrainedModel = std::variant<SvmModel, ForestModel, BoostModel>;

struct Prediction {
  // SVM decision value or tree-ensemble P(+1); larger means more positive.
  double score = 0.0;
  int label = 1;
};

TrainedModel fit_model(const LearnerConfig& config, const LabeledDataset& data);
Prediction predict(const TrainedModel& model, std::span<const double> x);
size_t input_dim(const TrainedModel& model);
LearnerConfig config_of(const TrainedModel& model);

// "svm", "forest" or "boost".
std::string learner_name(const LearnerConfig& config);
std::string learner_name(const TrainedModel& model);
// Compact human-readable setting, e.g. "svm(kernel=rbf,C=10,gamma=0.01)".
std::string describe(const LearnerConfig& config);

}  // namespace covidx
