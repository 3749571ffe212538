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

#include "covidx/cascade.hpp"

#include <stdexcept>

#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"
#include "covidx/util.hpp"

namespace covidx {
namespace {

constexpr PhaseInfo kPhases[kPhaseCount] = {
    {"healthy_vs_unhealthy", "Healthy", "Unhealthy"},
    {"pneumonia_vs_covid", "Pneumonia", "COVID"},
    {"covid_severity", "Low", "High"},
};

void append_rows(LabeledDataset& d, const FeatureSet& set, int label, std::span<const size_t> rows) {
  const Eigen::Index start = d.X.rows();
  d.X.conservativeResize(start + static_cast<Eigen::Index>(rows.size()), set.X.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    d.X.row(start + static_cast<Eigen::Index>(i)) = set.X.row(static_cast<Eigen::Index>(rows[i]));
    d.y.push_back(label);
    d.ids.push_back(set.ids[rows[i]]);
  }
}

std::vector<size_t> all_rows(const FeatureSet& set) {
  std::vector<size_t> rows(set.size());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return rows;
}

LabeledDataset empty_like(const FeatureSet& a, const FeatureSet& b) {
  LabeledDataset d;
  d.X.resize(0, std::max(a.X.cols(), b.X.cols()));
  return d;
}

void require_nonempty(const FeatureSet& set, const char* what, const char* phases) {
  if (set.size() == 0) throw ClassTooSmall(std::string("no ") + what + " images; cannot train " + phases);
}

}  // namespace

std::string to_string(FinalLabel label) {
  switch (label) {
    case FinalLabel::kHealthy: return "Healthy";
    case FinalLabel::kPneumonia: return "Pneumonia";
    case FinalLabel::kCovidLow: return "COVID-Low";
    case FinalLabel::kCovidHigh: return "COVID-High";
  }
  return "unknown";
}

std::optional<FinalLabel> parse_final_label(std::string_view text) {
  for (FinalLabel l : kFinalLabels) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

const PhaseInfo& phase_info(int phase) { return kPhases[phase]; }

FeatureSet make_feature_set(std::span<const FeatureVector> features, std::vector<std::string> ids) {
  if (features.size() != ids.size()) throw std::invalid_argument("features and ids differ in length");
  FeatureSet set;
  set.ids = std::move(ids);
  const size_t d = features.empty() ? 0 : features.front().values.size();
  set.X.resize(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(d));
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != d) throw DimensionError("feature vectors differ in length");
    for (size_t j = 0; j < d; ++j) set.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = features[i].values[j];
  }
  return set;
}

std::string prep_digest(const PrepConfig& prep) { return sha256_hex(nlohmann::json(prep).dump()); }

std::array<LabeledDataset, kPhaseCount> build_phase_datasets(const FeatureSet& healthy,
                                                            const FeatureSet& pneumonia,
                                                            const FeatureSet& covid,
                                                            std::span<const std::optional<Severity>> severity) {
  require_nonempty(healthy, "healthy", "the health phase");
  require_nonempty(pneumonia, "pneumonia", "the COVID phase");
  require_nonempty(covid, "COVID-19", "the COVID and severity phases");
  if (severity.size() != covid.size()) {
    throw std::invalid_argument("severity list must align with the COVID-19 rows");
  }

  std::array<LabeledDataset, kPhaseCount> out;
  out[0] = empty_like(healthy, covid);
  append_rows(out[0], healthy, -1, all_rows(healthy));
  append_rows(out[0], pneumonia, 1, all_rows(pneumonia));
  append_rows(out[0], covid, 1, all_rows(covid));

  out[1] = empty_like(pneumonia, covid);
  append_rows(out[1], pneumonia, -1, all_rows(pneumonia));
  append_rows(out[1], covid, 1, all_rows(covid));

  std::vector<size_t> low, high;
  for (size_t i = 0; i < severity.size(); ++i) {
    if (severity[i]) (*severity[i] == Severity::kHigh ? high : low).push_back(i);
  }
  if (low.empty() || high.empty()) throw ClassTooSmall("severity phase needs both low and high COVID-19 images");
  out[2] = empty_like(covid, covid);
  append_rows(out[2], covid, -1, low);
  append_rows(out[2], covid, 1, high);
  return out;
}

CascadeModel cascade_train(const FeatureSet& healthy, const FeatureSet& pneumonia,
                           const FeatureSet& covid, std::span<const std::optional<Severity>> severity,
                           const CascadeSpec& spec) {
  const auto datasets = build_phase_datasets(healthy, pneumonia, covid, severity);
  CascadeModel model;
  model.extractor_spec = spec.extractor_spec;
  model.extractor_id = spec.extractor_id;
  model.prep = spec.prep;
  model.prep_digest = prep_digest(spec.prep);

  for (int p = 0; p < kPhaseCount; ++p) {
    const GridResult grid = grid_search(spec.grids[p], datasets[p], spec.k, spec.metric, spec.seed);
    PhaseSummary& summary = model.summaries[p];
    summary.selected = describe(grid.best());
    summary.cv = grid.cells[grid.best_index].report;
    for (const GridCell& cell : grid.cells) {
      const std::string name = learner_name(cell.config);
      auto it = summary.per_learner.find(name);
      if (it == summary.per_learner.end() ||
          cell.report.at(spec.metric).mean > it->second.at(spec.metric).mean) {
        summary.per_learner[name] = cell.report;
      }
    }
    model.phases[p] = fit_model(grid.best(), datasets[p]);
  }
  return model;
}

CascadeResult cascade_predict_features(const CascadeModel& model, std::span<const double> features) {
  CascadeResult result;
  const Prediction p1 = predict(model.phases[0], features);
  result.phase1_score = p1.score;
  if (p1.label < 0) {
    result.final_label = FinalLabel::kHealthy;
    return result;
  }
  const Prediction p2 = predict(model.phases[1], features);
  result.phase2_score = p2.score;
  if (p2.label < 0) {
    result.final_label = FinalLabel::kPneumonia;
    return result;
  }
  const Prediction p3 = predict(model.phases[2], features);
  result.phase3_score = p3.score;
  result.final_label = p3.label > 0 ? FinalLabel::kCovidHigh : FinalLabel::kCovidLow;
  return result;
}

FeatureVector extract_features(const Extractor& extractor, const PrepConfig& prep,
                               std::span<const uint8_t> image_bytes) {
  return extractor.extract(preprocess(image_bytes, prep));
}

CascadeResult cascade_predict(const CascadeModel& model, const Extractor& extractor,
                              std::span<const uint8_t> image_bytes) {
  if (extractor.id() != model.extractor_id) {
    throw ExtractorMismatch("model was trained with extractor '" + model.extractor_id + "' but '" +
                            extractor.id() + "' is loaded");
  }
  const FeatureVector f = extract_features(extractor, model.prep, image_bytes);
  return cascade_predict_features(model, f.values);
}

FinalLabel truth_label(const std::string& class_name, std::optional<Severity> severity) {
  if (class_name == "healthy") return FinalLabel::kHealthy;
  if (class_name == "pneumonia") return FinalLabel::kPneumonia;
  if (class_name == "covid") {
    if (!severity) throw SeverityGap("COVID-19 image without severity label");
    return *severity == Severity::kHigh ? FinalLabel::kCovidHigh : FinalLabel::kCovidLow;
  }
  throw std::invalid_argument("unknown class " + class_name);
}

}  // namespace covidx
