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

#include "covidx/model.hpp"

#include <sstream>

namespace covidx {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string depth_text(int depth) { return depth == 0 ? "none" : std::to_string(depth); }

}  // namespace

TrainedModel fit_model(const LearnerConfig& config, const LabeledDataset& data) {
  return std::visit(Overloaded{
                        [&](const SvmParams& p) -> TrainedModel { return svm_fit(data, p); },
                        [&](const ForestParams& p) -> TrainedModel { return forest_fit(data, p); },
                        [&](const BoostParams& p) -> TrainedModel { return boost_fit(data, p); },
                    },
                    config);
}

Prediction predict(const TrainedModel& model, std::span<const double> x) {
  return std::visit(Overloaded{
                        [&](const SvmModel& m) {
                          const double s = svm_decision(m, x);
                          return Prediction{s, s >= 0.0 ? 1 : -1};
                        },
                        [&](const ForestModel& m) {
                          const double p = forest_proba(m, x);
                          return Prediction{p, p >= 0.5 ? 1 : -1};
                        },
                        [&](const BoostModel& m) {
                          const double p = boost_proba(m, x);
                          return Prediction{p, p >= 0.5 ? 1 : -1};
                        },
                    },
                    model);
}

size_t input_dim(const TrainedModel& model) {
  return std::visit([](const auto& m) { return m.scaler.dim(); }, model);
}

LearnerConfig config_of(const TrainedModel& model) {
  return std::visit([](const auto& m) -> LearnerConfig { return m.params; }, model);
}

std::string learner_name(const LearnerConfig& config) {
  static constexpr const char* kNames[] = {"svm", "forest", "boost"};
  return kNames[config.index()];
}

std::string learner_name(const TrainedModel& model) { return learner_name(config_of(model)); }

std::string describe(const LearnerConfig& config) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const SvmParams& p) {
                   os << "svm(kernel=" << (p.kernel == KernelKind::kLinear ? "linear" : "rbf")
                      << ",C=" << p.C;
                   if (p.kernel == KernelKind::kRbf) os << ",gamma=" << p.gamma;
                   os << ")";
                 },
                 [&](const ForestParams& p) {
                   os << "forest(trees=" << p.n_trees << ",max_depth=" << depth_text(p.max_depth)
                      << ",max_features=" << (p.max_features == 0 ? "sqrt" : std::to_string(p.max_features))
                      << ",min_samples_split=" << p.min_samples_split << ")";
                 },
                 [&](const BoostParams& p) {
                   os << "boost(rounds=" << p.n_rounds << ",lr=" << p.learning_rate
                      << ",max_depth=" << p.max_depth << ",subsample=" << p.subsample << ")";
                 },
             },
             config);
  return os.str();
}

}  // namespace covidx
