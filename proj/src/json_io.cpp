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

#include "covidx/json_io.hpp"

#include <string>

#include "covidx/errors.hpp"

namespace covidx {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

std::vector<json> values_of(const json& spec, const char* key, json fallback) {
  if (!spec.contains(key)) return {std::move(fallback)};
  const json& v = spec.at(key);
  if (!v.is_array()) return {v};
  if (v.empty()) throw ConfigError(std::string("grid list '") + key + "' is empty");
  return v.get<std::vector<json>>();
}

KernelKind parse_kernel(const std::string& s) {
  if (s == "linear") return KernelKind::kLinear;
  if (s == "rbf") return KernelKind::kRbf;
  throw ConfigError("unknown SVM kernel: " + s);
}

}  // namespace

void to_json(json& j, const PrepConfig& v) {
  j = json{{"target_size", v.target_size},
           {"median_kernel", v.median_kernel},
           {"stretch_low_pct", v.stretch_low_pct},
           {"stretch_high_pct", v.stretch_high_pct}};
}

void from_json(const json& j, PrepConfig& v) {
  read_opt(j, "target_size", v.target_size);
  read_opt(j, "median_kernel", v.median_kernel);
  read_opt(j, "stretch_low_pct", v.stretch_low_pct);
  read_opt(j, "stretch_high_pct", v.stretch_high_pct);
}

void to_json(json& j, const ExtractorSpec& v) {
  if (v.kind == ExtractorKind::kBaseline) {
    j = json{{"kind", "baseline"}};
    return;
  }
  j = json{{"kind", "neural"},
           {"graph", v.graph_path},
           {"input_size", v.input_size},
           {"mean", v.mean},
           {"scale", v.scale},
           {"layout", v.layout == TensorLayout::kNCHW ? "nchw" : "nhwc"}};
}

void from_json(const json& j, ExtractorSpec& v) {
  const std::string kind = j.value("kind", "baseline");
  if (kind == "baseline") {
    v = ExtractorSpec{};
    return;
  }
  if (kind != "neural") throw ConfigError("unknown extractor kind: " + kind);
  const std::string graph = j.value("graph", "");
  const int input_size = j.value("input_size", 224);
  if (j.value("normalization", "") == "imagenet") {
    v = ExtractorSpec::imagenet(graph, input_size);
  } else {
    v = ExtractorSpec{};
    v.kind = ExtractorKind::kNeural;
    v.graph_path = graph;
    v.input_size = input_size;
  }
  read_opt(j, "mean", v.mean);
  read_opt(j, "scale", v.scale);
  const std::string layout = j.value("layout", "nchw");
  if (layout == "nchw") v.layout = TensorLayout::kNCHW;
  else if (layout == "nhwc") v.layout = TensorLayout::kNHWC;
  else throw ConfigError("unknown tensor layout: " + layout);
}

void to_json(json& j, const SvmParams& v) {
  j = json{{"C", v.C},
           {"kernel", v.kernel == KernelKind::kLinear ? "linear" : "rbf"},
           {"gamma", v.gamma},
           {"tol", v.tol},
           {"max_passes", v.max_passes},
           {"positive_weight", v.positive_weight},
           {"negative_weight", v.negative_weight}};
}

void from_json(const json& j, SvmParams& v) {
  read_opt(j, "C", v.C);
  if (j.contains("kernel")) v.kernel = parse_kernel(j.at("kernel").get<std::string>());
  read_opt(j, "gamma", v.gamma);
  read_opt(j, "tol", v.tol);
  read_opt(j, "max_passes", v.max_passes);
  read_opt(j, "positive_weight", v.positive_weight);
  read_opt(j, "negative_weight", v.negative_weight);
}

void to_json(json& j, const ForestParams& v) {
  j = json{{"n_trees", v.n_trees},
           {"max_features", v.max_features},
           {"max_depth", v.max_depth},
           {"min_samples_split", v.min_samples_split},
           {"bootstrap", v.bootstrap},
           {"hard_vote", v.hard_vote},
           {"seed", v.seed}};
}

void from_json(const json& j, ForestParams& v) {
  read_opt(j, "n_trees", v.n_trees);
  read_opt(j, "max_features", v.max_features);
  read_opt(j, "max_depth", v.max_depth);
  read_opt(j, "min_samples_split", v.min_samples_split);
  read_opt(j, "bootstrap", v.bootstrap);
  read_opt(j, "hard_vote", v.hard_vote);
  read_opt(j, "seed", v.seed);
}

void to_json(json& j, const BoostParams& v) {
  j = json{{"learning_rate", v.learning_rate},
           {"max_depth", v.max_depth},
           {"n_rounds", v.n_rounds},
           {"subsample", v.subsample},
           {"min_samples_split", v.min_samples_split},
           {"positive_weight", v.positive_weight},
           {"seed", v.seed}};
}

void from_json(const json& j, BoostParams& v) {
  read_opt(j, "learning_rate", v.learning_rate);
  read_opt(j, "max_depth", v.max_depth);
  read_opt(j, "n_rounds", v.n_rounds);
  read_opt(j, "subsample", v.subsample);
  read_opt(j, "min_samples_split", v.min_samples_split);
  read_opt(j, "positive_weight", v.positive_weight);
  read_opt(j, "seed", v.seed);
}

void to_json(json& j, const MetricSummary& v) {
  j = json{{"mean", v.mean}, {"std", v.std}, {"per_fold", v.per_fold}};
}

void from_json(const json& j, MetricSummary& v) {
  read_opt(j, "mean", v.mean);
  read_opt(j, "std", v.std);
  read_opt(j, "per_fold", v.per_fold);
}

void to_json(json& j, const EvalReport& v) {
  j = json{{"metrics", v.metrics}, {"confusion", v.confusion}};
}

void from_json(const json& j, EvalReport& v) {
  read_opt(j, "metrics", v.metrics);
  read_opt(j, "confusion", v.confusion);
}

json learner_to_json(const LearnerConfig& config) {
  json j = std::visit([](const auto& p) { return json(p); }, config);
  j["learner"] = learner_name(config);
  return j;
}

LearnerConfig learner_from_json(const json& j) {
  const std::string name = j.value("learner", "");
  if (name == "svm") return j.get<SvmParams>();
  if (name == "forest") return j.get<ForestParams>();
  if (name == "boost") return j.get<BoostParams>();
  throw ConfigError("unknown learner: '" + name + "'");
}

namespace {

// Fixed (non-list) settings of a learner entry.
json scalar_part(const json& spec) {
  json out = json::object();
  for (const auto& [key, value] : spec.items()) {
    if (!value.is_array()) out[key] = value;
  }
  return out;
}

std::vector<LearnerConfig> expand_grid_unchecked(const json& grid, uint64_t seed) {
  if (!grid.is_object() || grid.empty()) throw ConfigError("grid must be a non-empty object");
  std::vector<LearnerConfig> out;
  for (const auto& [name, spec] : grid.items()) {
    if (name == "svm") {
      const SvmParams base = scalar_part(spec).get<SvmParams>();
      for (const json& kernel : values_of(spec, "kernel", "linear")) {
        const KernelKind kind = parse_kernel(kernel.get<std::string>());
        const auto gammas = kind == KernelKind::kRbf ? values_of(spec, "gamma", base.gamma)
                                                     : std::vector<json>{base.gamma};
        for (const json& c : values_of(spec, "C", base.C)) {
          for (const json& g : gammas) {
            SvmParams p = base;
            p.kernel = kind;
            p.C = c.get<double>();
            p.gamma = g.get<double>();
            p.validate();
            out.emplace_back(p);
          }
        }
      }
    } else if (name == "forest") {
      ForestParams base;
      base.bootstrap = spec.value("bootstrap", true);
      base.hard_vote = spec.value("hard_vote", false);
      for (const json& trees : values_of(spec, "n_trees", base.n_trees))
        for (const json& depth : values_of(spec, "max_depth", base.max_depth))
          for (const json& feats : values_of(spec, "max_features", base.max_features))
            for (const json& split : values_of(spec, "min_samples_split", base.min_samples_split)) {
              ForestParams p = base;
              p.n_trees = trees.get<int>();
              p.max_depth = depth.get<int>();
              p.max_features = feats.get<int>();
              p.min_samples_split = split.get<int>();
              p.seed = seed;
              p.validate();
              out.emplace_back(p);
            }
    } else if (name == "boost") {
      BoostParams base;
      for (const json& lr : values_of(spec, "learning_rate", base.learning_rate))
        for (const json& depth : values_of(spec, "max_depth", base.max_depth))
          for (const json& rounds : values_of(spec, "n_rounds", base.n_rounds))
            for (const json& sub : values_of(spec, "subsample", base.subsample)) {
              BoostParams p = base;
              p.learning_rate = lr.get<double>();
              p.max_depth = depth.get<int>();
              p.n_rounds = rounds.get<int>();
              p.subsample = sub.get<double>();
              p.seed = seed;
              p.validate();
              out.emplace_back(p);
            }
    } else {
      throw ConfigError("unknown learner in grid: '" + name + "'");
    }
  }
  return out;
}

}  // namespace

std::vector<LearnerConfig> expand_grid(const json& grid, uint64_t seed) {
  try {
    return expand_grid_unchecked(grid, seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

json default_grid_json() {
  return json{
      {"svm",
       {{"kernel", {"linear", "rbf"}},
        {"C", {0.01, 0.1, 1.0, 10.0, 100.0}},
        {"gamma", {1e-4, 1e-3, 1e-2, 1e-1, 1.0}}}},
      {"forest", {{"n_trees", {100, 300}}, {"max_depth", {3, 6, 0}}}},
      {"boost",
       {{"learning_rate", {0.05, 0.1, 0.3}},
        {"max_depth", {3, 6}},
        {"n_rounds", {100}},
        {"subsample", {0.8, 1.0}}}},
  };
}

}  // namespace covidx
