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

#include "covidx/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"
#include "covidx/metrics.hpp"
#include "covidx/util.hpp"
#include "covidx/validation.hpp"

namespace covidx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {"data", "external_data", "extractor", "prep", "grid", "grids",
                                           "k", "test_fraction", "seed", "metric", "output"};
const std::set<std::string> kMetrics = {"f1", "roc_auc", "pr_auc"};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

// COVID severities merged; rows and columns in this order.
enum Coarse { kCoarseCovid = 0, kCoarsePneumonia = 1, kCoarseHealthy = 2 };

int coarse_of(FinalLabel l) {
  switch (l) {
    case FinalLabel::kHealthy: return kCoarseHealthy;
    case FinalLabel::kPneumonia: return kCoarsePneumonia;
    default: return kCoarseCovid;
  }
}

json matrix_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (const auto& r : cm) rows.push_back(r);
  return rows;
}

json phase_metrics(const std::vector<double>& scores, const std::vector<int>& truth,
                   const std::vector<int>& predicted) {
  json out{{"n", scores.size()}, {"roc_auc", nullptr}, {"pr_auc", nullptr}, {"f1", nullptr}};
  if (scores.empty()) return out;
  const bool has_pos = std::count(truth.begin(), truth.end(), 1) > 0;
  const bool has_neg = std::count(truth.begin(), truth.end(), -1) > 0;
  if (has_pos && has_neg) out["roc_auc"] = roc_auc(scores, truth);
  if (has_pos) out["pr_auc"] = pr_auc(scores, truth);
  out["f1"] = f1_score(predicted, truth, 1);
  static constexpr int kBinary[] = {-1, 1};
  out["confusion"] = matrix_json(confusion(predicted, truth, kBinary));
  return out;
}

std::string plus_minus(const MetricSummary& s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f±%.2f", s.mean, s.std);
  return buf;
}

json counts_by_label(const std::vector<ImageRecord>& records, std::span<const size_t> rows) {
  json out = json::object();
  for (FinalLabel l : kFinalLabels) out[to_string(l)] = 0;
  for (size_t r : rows) out[to_string(records[r].truth)] = out[to_string(records[r].truth)].get<int>() + 1;
  return out;
}

json cv_section(const CascadeModel& model) {
  json phases = json::array();
  for (int p = 0; p < kPhaseCount; ++p) {
    const PhaseSummary& s = model.summaries[p];
    json per_learner = json::object();
    for (const auto& [name, report] : s.per_learner) per_learner[name] = report;
    phases.push_back(json{{"task", phase_info(p).task},
                          {"selected", s.selected},
                          {"report", s.cv},
                          {"per_learner", per_learner}});
  }
  return phases;
}

// One row per phase and learner family, mean±std as in a results table.
json table_section(const CascadeModel& model) {
  json rows = json::array();
  for (int p = 0; p < kPhaseCount; ++p) {
    for (const auto& [name, report] : model.summaries[p].per_learner) {
      rows.push_back(json{{"task", phase_info(p).task},
                          {"learner", name},
                          {"f1", plus_minus(report.at("f1"))},
                          {"roc_auc", plus_minus(report.at("roc_auc"))},
                          {"pr_auc", plus_minus(report.at("pr_auc"))}});
    }
  }
  return rows;
}

std::shared_ptr<const Extractor> checked_extractor(const CascadeModel& model) {
  auto extractor = load_extractor(model.extractor_spec);
  if (extractor->id() != model.extractor_id) {
    throw ExtractorMismatch("bundle expects extractor '" + model.extractor_id + "' but '" + extractor->id() +
                            "' was loaded");
  }
  return extractor;
}

}  // namespace

void RunConfig::validate() const {
  if (data_root.empty()) throw ConfigError("config: 'data' is required");
  if (k < 2) throw ConfigError("config: k must be at least 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("config: test_fraction must lie in (0, 1)");
  }
  if (!kMetrics.count(metric)) throw ConfigError("config: unknown selection metric '" + metric + "'");
  extractor.validate();
  prep.validate();
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kConfigKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  RunConfig c;
  try {
    if (j.contains("data")) c.data_root = resolve(base_dir, j.at("data").get<std::string>());
    if (j.contains("external_data") && !j.at("external_data").is_null()) {
      c.external_root = resolve(base_dir, j.at("external_data").get<std::string>());
    }
    if (j.contains("extractor")) c.extractor = j.at("extractor").get<ExtractorSpec>();
    if (c.extractor.kind == ExtractorKind::kNeural) {
      c.extractor.graph_path = resolve(base_dir, c.extractor.graph_path).string();
    }
    if (j.contains("prep")) c.prep = j.at("prep").get<PrepConfig>();
    const json shared = j.value("grid", default_grid_json());
    for (int p = 0; p < kPhaseCount; ++p) c.grids[p] = shared;
    if (j.contains("grids")) {
      for (const auto& [key, value] : j.at("grids").items()) {
        if (key != "phase1" && key != "phase2" && key != "phase3") {
          throw ConfigError("config: grids keys are phase1, phase2, phase3");
        }
        c.grids[key.back() - '1'] = value;
      }
    }
    c.k = j.value("k", c.k);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.seed = j.value("seed", c.seed);
    c.metric = j.value("metric", c.metric);
    if (j.contains("output")) {
      const json& o = j.at("output");
      if (o.contains("bundle")) c.bundle_path = resolve(base_dir, o.at("bundle").get<std::string>());
      if (o.contains("report")) c.report_path = resolve(base_dir, o.at("report").get<std::string>());
    } else {
      c.bundle_path = base_dir / c.bundle_path;
      c.report_path = base_dir / c.report_path;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  const auto bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

ExtractorSpec extractor_from_flag(const std::string& value) {
  if (value == "baseline") return ExtractorSpec{};
  return ExtractorSpec::imagenet(fs::absolute(value).string());
}

std::vector<ImageRecord> list_records(const DatasetManifest& manifest) {
  std::vector<ImageRecord> out;
  for (const auto& [name, files] : manifest.classes) {
    for (const fs::path& f : files) {
      std::optional<Severity> severity;
      if (name == "covid") severity = manifest.severity_of(f);
      out.push_back({f, name, truth_label(name, severity)});
    }
  }
  return out;
}

std::vector<FeatureVector> extract_all(const Extractor& extractor, const PrepConfig& prep,
                                       const std::vector<ImageRecord>& records) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (const ImageRecord& r : records) {
    try {
      out.push_back(extract_features(extractor, prep, read_file(r.path)));
    } catch (const DecodeError& e) {
      throw UnreadableFile(r.path.string() + ": " + e.what());
    }
  }
  return out;
}

json evaluate_cascade(const CascadeModel& model, const std::vector<ImageRecord>& records,
                      const std::vector<FeatureVector>& features) {
  if (records.size() != features.size()) throw std::invalid_argument("records and features differ in length");
  std::vector<int> truth4, pred4, truth3, pred3;
  std::vector<double> scores[kPhaseCount];
  std::vector<int> truth[kPhaseCount], predicted[kPhaseCount];

  for (size_t i = 0; i < records.size(); ++i) {
    const std::span<const double> x = features[i].values;
    const FinalLabel t = records[i].truth;
    const CascadeResult r = cascade_predict_features(model, x);
    truth4.push_back(static_cast<int>(t));
    pred4.push_back(static_cast<int>(r.final_label));
    truth3.push_back(coarse_of(t));
    pred3.push_back(coarse_of(r.final_label));

    // Each phase is scored on the images that belong to its task.
    auto score = [&](int p, int label) {
      const Prediction pr = predict(model.phases[p], x);
      scores[p].push_back(pr.score);
      truth[p].push_back(label);
      predicted[p].push_back(pr.label);
    };
    score(0, t == FinalLabel::kHealthy ? -1 : 1);
    if (t != FinalLabel::kHealthy) score(1, t == FinalLabel::kPneumonia ? -1 : 1);
    if (t == FinalLabel::kCovidLow || t == FinalLabel::kCovidHigh) score(2, t == FinalLabel::kCovidHigh ? 1 : -1);
  }

  static constexpr int kFour[] = {0, 1, 2, 3};
  static constexpr int kThree[] = {kCoarseCovid, kCoarsePneumonia, kCoarseHealthy};
  json out;
  json phases = json::array();
  for (int p = 0; p < kPhaseCount; ++p) {
    json m = phase_metrics(scores[p], truth[p], predicted[p]);
    m["task"] = phase_info(p).task;
    phases.push_back(m);
  }
  out["phases"] = phases;
  out["n"] = records.size();

  const ConfusionMatrix cm4 = confusion(pred4, truth4, kFour);
  json labels4 = json::array();
  for (FinalLabel l : kFinalLabels) labels4.push_back(to_string(l));
  out["confusion"] = json{{"labels", labels4}, {"matrix", matrix_json(cm4)}};
  out["per_class_f1"] = per_class_f1(cm4);
  out["macro_f1"] = records.empty() ? 0.0 : macro_f1(cm4);

  const ConfusionMatrix cm3 = confusion(pred3, truth3, kThree);
  out["three_class"] = json{{"labels", {"COVID", "Pneumonia", "Healthy"}},
                     {"matrix", matrix_json(cm3)},
                     {"per_class_f1", per_class_f1(cm3)}};
  return out;
}

TrainOutcome run_training(const RunConfig& config) {
  config.validate();
  LoadOptions opts;
  opts.require_severity = true;
  const DatasetManifest manifest = load_dataset(config.data_root, opts);
  const std::vector<ImageRecord> records = list_records(manifest);

  std::vector<int> fine(records.size());
  for (size_t i = 0; i < records.size(); ++i) fine[i] = static_cast<int>(records[i].truth);
  const SplitIndices split = stratified_split(fine, config.test_fraction, config.seed);

  const auto extractor = load_extractor(config.extractor);
  const std::vector<FeatureVector> features = extract_all(*extractor, config.prep, records);

  std::vector<FeatureVector> by_class[3];
  std::vector<std::string> ids[3];
  std::vector<std::optional<Severity>> severity;
  for (size_t r : split.train) {
    const FinalLabel t = records[r].truth;
    const int c = t == FinalLabel::kHealthy ? 0 : t == FinalLabel::kPneumonia ? 1 : 2;
    by_class[c].push_back(features[r]);
    ids[c].push_back(records[r].path.filename().string());
    if (c == 2) severity.push_back(t == FinalLabel::kCovidHigh ? Severity::kHigh : Severity::kLow);
  }

  CascadeSpec spec;
  spec.extractor_spec = config.extractor;
  spec.extractor_id = extractor->id();
  spec.prep = config.prep;
  spec.k = config.k;
  spec.seed = config.seed;
  spec.metric = config.metric;
  for (int p = 0; p < kPhaseCount; ++p) {
    spec.grids[p] = expand_grid(config.grids[p], config.seed);
    if (spec.grids[p].empty()) throw ConfigError(std::string("empty grid for ") + phase_info(p).task);
  }

  TrainOutcome out;
  out.model = cascade_train(make_feature_set(by_class[0], ids[0]), make_feature_set(by_class[1], ids[1]),
                            make_feature_set(by_class[2], ids[2]), severity, spec);
  out.digest = save_bundle(out.model, config.bundle_path);

  std::vector<ImageRecord> held_records;
  std::vector<FeatureVector> held_features;
  for (size_t r : split.test) {
    held_records.push_back(records[r]);
    held_features.push_back(features[r]);
  }

  json report;
  report["seed"] = config.seed;
  report["k"] = config.k;
  report["test_fraction"] = config.test_fraction;
  report["metric"] = config.metric;
  report["extractor_id"] = extractor->id();
  report["prep"] = config.prep;
  report["bundle"] = json{{"path", config.bundle_path.string()}, {"digest", out.digest}};
  report["split"] = json{{"train", counts_by_label(records, split.train)},
                         {"heldout", counts_by_label(records, split.test)}};
  report["cv"] = cv_section(out.model);
  report["table"] = table_section(out.model);
  report["heldout"] = evaluate_cascade(out.model, held_records, held_features);
  if (config.external_root) {
    const DatasetManifest ext = load_dataset(*config.external_root, opts);
    const auto ext_records = list_records(ext);
    report["external"] = evaluate_cascade(out.model, ext_records, extract_all(*extractor, config.prep, ext_records));
  }
  out.report = std::move(report);
  write_file(config.report_path, out.report.dump(2) + "\n");
  return out;
}

json run_evaluation(const LoadedBundle& bundle, const fs::path& data_root) {
  LoadOptions opts;
  opts.require_severity = true;
  const DatasetManifest manifest = load_dataset(data_root, opts);
  const auto records = list_records(manifest);
  const auto extractor = checked_extractor(bundle.model);
  json report = evaluate_cascade(bundle.model, records, extract_all(*extractor, bundle.model.prep, records));
  report["model_digest"] = bundle.digest;
  report["data"] = data_root.string();
  std::vector<size_t> all(records.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  report["counts"] = counts_by_label(records, all);
  return report;
}

}  // namespace covidx
