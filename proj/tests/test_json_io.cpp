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

#include <gtest/gtest.h>

#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"

namespace covidx {
namespace {

using nlohmann::json;

TEST(JsonIoTest, PrepRoundTripAndDefaults) {
  PrepConfig p;
  p.target_size = 64;
  p.median_kernel = 5;
  p.stretch_low_pct = 1;
  EXPECT_EQ(json(p).get<PrepConfig>(), p);
  EXPECT_EQ(json::object().get<PrepConfig>(), PrepConfig{});
}

TEST(JsonIoTest, ExtractorSpecForms) {
  EXPECT_EQ(json::object().get<ExtractorSpec>().kind, ExtractorKind::kBaseline);
  const ExtractorSpec img = json{{"kind", "neural"}, {"graph", "g.onnx"}, {"normalization", "imagenet"}}.get<ExtractorSpec>();
  const ExtractorSpec ref = ExtractorSpec::imagenet("g.onnx", 224);
  EXPECT_EQ(img.mean, ref.mean);
  EXPECT_EQ(img.scale, ref.scale);
  const ExtractorSpec back = json(img).get<ExtractorSpec>();
  EXPECT_EQ(back.graph_path, "g.onnx");
  EXPECT_EQ(back.mean, ref.mean);
  EXPECT_THROW((json{{"kind", "mystery"}}.get<ExtractorSpec>()), ConfigError);
  EXPECT_THROW((json{{"kind", "neural"}, {"layout", "chw"}}.get<ExtractorSpec>()), ConfigError);
}

TEST(JsonIoTest, LearnerRoundTrips) {
  SvmParams s;
  s.kernel = KernelKind::kRbf;
  s.C = 3;
  s.gamma = 0.02;
  ForestParams f;
  f.n_trees = 7;
  f.hard_vote = true;
  f.seed = 11;
  BoostParams b;
  b.learning_rate = 0.3;
  b.subsample = 0.8;
  for (const LearnerConfig& c : {LearnerConfig{s}, LearnerConfig{f}, LearnerConfig{b}}) {
    const json j = learner_to_json(c);
    EXPECT_EQ(learner_to_json(learner_from_json(j)), j);
    EXPECT_EQ(describe(learner_from_json(j)), describe(c));
  }
  EXPECT_THROW(learner_from_json(json{{"learner", "knn"}}), ConfigError);
  EXPECT_THROW(learner_from_json(json{{"learner", "svm"}, {"kernel", "poly"}}), ConfigError);
}

TEST(JsonIoTest, ReportRoundTrip) {
  EvalReport r;
  r.metrics["f1"] = summarize({0.5, 1.0});
  r.confusion = {{3, 1}, {0, 4}};
  const EvalReport back = json(r).get<EvalReport>();
  EXPECT_EQ(back.at("f1").per_fold, r.at("f1").per_fold);
  EXPECT_EQ(back.at("f1").mean, 0.75);
  EXPECT_EQ(back.confusion, r.confusion);
}

TEST(ExpandGridTest, CartesianCountsAndLinearIgnoresGamma) {
  const json grid = {{"svm", {{"kernel", {"linear", "rbf"}}, {"C", {1, 10}}, {"gamma", {0.1, 0.01, 0.001}}}},
                     {"forest", {{"n_trees", {5, 10}}, {"max_depth", {2, 0}}}},
                     {"boost", {{"learning_rate", 0.1}, {"n_rounds", {5, 10}}}}};
  const auto configs = expand_grid(grid, 42);
  size_t svm = 0, forest = 0, boost = 0, linear = 0;
  for (const auto& c : configs) {
    if (const auto* s = std::get_if<SvmParams>(&c)) {
      ++svm;
      linear += s->kernel == KernelKind::kLinear;
    } else if (const auto* f = std::get_if<ForestParams>(&c)) {
      ++forest;
      EXPECT_EQ(f->seed, 42u);
    } else {
      ++boost;
      EXPECT_EQ(std::get<BoostParams>(c).seed, 42u);
    }
  }
  EXPECT_EQ(svm, 2u + 6u);
  EXPECT_EQ(linear, 2u);
  EXPECT_EQ(forest, 4u);
  EXPECT_EQ(boost, 2u);
}

TEST(ExpandGridTest, DefaultGridExpands) {
  const auto configs = expand_grid(default_grid_json(), 0);
  EXPECT_EQ(configs.size(), (5u + 25u) + 6u + 12u);
}

TEST(ExpandGridTest, Errors) {
  EXPECT_THROW(expand_grid(json::object(), 0), ConfigError);
  EXPECT_THROW(expand_grid(json{{"knn", json::object()}}, 0), ConfigError);
  EXPECT_THROW(expand_grid(json{{"svm", {{"C", json::array()}}}}, 0), ConfigError);
  EXPECT_THROW(expand_grid(json{{"svm", {{"C", {"big"}}}}}, 0), ConfigError);
  EXPECT_THROW(expand_grid(json{{"svm", {{"C", {-1}}}}}, 0), std::exception);
}

}  // namespace
}  // namespace covidx
