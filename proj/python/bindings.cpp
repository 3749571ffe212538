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

// Python module _covidx. JSON-shaped results cross the boundary as strings
// and are decoded by the covidx package.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "covidx/cascade.hpp"
#include "covidx/datastore.hpp"
#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"
#include "covidx/metrics.hpp"
#include "covidx/pipeline.hpp"
#include "covidx/service.hpp"
#include "covidx/synth.hpp"
#include "covidx/validation.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

std::span<const uint8_t> as_bytes(const py::bytes& b, std::string& storage) {
  storage = b;
  return {reinterpret_cast<const uint8_t*>(storage.data()), storage.size()};
}

covidx::PrepConfig prep_from(const std::string& prep_json) {
  return prep_json.empty() ? covidx::PrepConfig{} : json::parse(prep_json).get<covidx::PrepConfig>();
}

py::array_t<double> image_array(const covidx::Image& img) {
  py::array_t<double> out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

// Same shape as the HTTP prediction body, minus the per-request fields.
std::string result_json(const covidx::CascadeResult& r, const std::string& digest) {
  json j = covidx::prediction_to_json(r, "", digest, 0.0);
  j.erase("request_id");
  j.erase("timing_ms");
  return j.dump();
}

class Bundle {
 public:
  explicit Bundle(const std::filesystem::path& path)
      : bundle_(covidx::load_bundle(path)), extractor_(covidx::load_extractor(bundle_.model.extractor_spec)) {}

  std::string predict(const py::bytes& image) const {
    std::string storage;
    const auto bytes = as_bytes(image, storage);
    covidx::CascadeResult r;
    {
      py::gil_scoped_release release;
      r = covidx::cascade_predict(bundle_.model, *extractor_, bytes);
    }
    return result_json(r, bundle_.digest);
  }
  const std::string& digest() const { return bundle_.digest; }
  std::string manifest() const { return bundle_.manifest.dump(); }
  std::string evaluate(const std::filesystem::path& root) const {
    return covidx::run_evaluation(bundle_, root).dump();
  }

 private:
  covidx::LoadedBundle bundle_;
  std::shared_ptr<const covidx::Extractor> extractor_;
};

class Model {
 public:
  Model(const covidx::Matrix& X, const std::vector<int>& y, const std::string& config_json) {
    covidx::LabeledDataset d{X, y, {}};
    for (size_t i = 0; i < y.size(); ++i) d.ids.push_back(std::to_string(i));
    model_ = covidx::fit_model(covidx::learner_from_json(json::parse(config_json)), d);
  }
  std::vector<double> scores(const covidx::Matrix& X) const {
    std::vector<double> out;
    for (Eigen::Index r = 0; r < X.rows(); ++r) out.push_back(covidx::predict(model_, covidx::row_span(X, r)).score);
    return out;
  }
  std::vector<int> labels(const covidx::Matrix& X) const {
    std::vector<int> out;
    for (Eigen::Index r = 0; r < X.rows(); ++r) out.push_back(covidx::predict(model_, covidx::row_span(X, r)).label);
    return out;
  }
  std::string describe() const { return covidx::describe(covidx::config_of(model_)); }

 private:
  covidx::TrainedModel model_;
};

}  // namespace

PYBIND11_MODULE(_covidx, m) {
  m.doc() = "COVIDX core bindings";
  static auto* error_type = new py::object(py::exception<covidx::Error>(m, "CovidxError"));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const covidx::Error& e) {
      py::object exc = (*error_type)(py::str(e.what()));
      exc.attr("code") = e.code();
      PyErr_SetObject(error_type->ptr(), exc.ptr());
    }
  });

  m.def(
      "preprocess",
      [](const py::bytes& image, const std::string& prep_json) {
        std::string storage;
        return image_array(covidx::preprocess(as_bytes(image, storage), prep_from(prep_json)));
      },
      py::arg("image"), py::arg("prep_json") = "");
  m.def(
      "baseline_features",
      [](const py::bytes& image, const std::string& prep_json) {
        std::string storage;
        return covidx::extract_features(*covidx::load_extractor({}), prep_from(prep_json), as_bytes(image, storage))
            .values;
      },
      py::arg("image"), py::arg("prep_json") = "");

  m.def("roc_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return covidx::roc_auc(s, y); });
  m.def("pr_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return covidx::pr_auc(s, y); });
  m.def("f1_score", [](const std::vector<int>& p, const std::vector<int>& t, int pos) {
    return covidx::f1_score(p, t, pos);
  });
  m.def("stratified_split", [](const std::vector<int>& labels, double frac, uint64_t seed) {
    const auto s = covidx::stratified_split(labels, frac, seed);
    return std::make_pair(s.train, s.test);
  });
  m.def("kfold", [](const std::vector<int>& labels, int k, uint64_t seed) {
    return covidx::kfold(labels, k, seed).fold_of;
  });

  py::class_<Model>(m, "Model")
      .def(py::init<const covidx::Matrix&, const std::vector<int>&, const std::string&>(), py::arg("X"),
           py::arg("y"), py::arg("config_json"))
      .def("scores", &Model::scores)
      .def("labels", &Model::labels)
      .def("describe", &Model::describe);

  py::class_<Bundle>(m, "Bundle")
      .def(py::init<const std::filesystem::path&>())
      .def("predict", &Bundle::predict)
      .def("evaluate", &Bundle::evaluate)
      .def_property_readonly("digest", &Bundle::digest)
      .def("manifest", &Bundle::manifest);

  m.def(
      "train",
      [](const std::filesystem::path& config, std::optional<uint64_t> seed) {
        covidx::RunConfig c = covidx::load_run_config(config);
        if (seed) c.seed = *seed;
        py::gil_scoped_release release;
        return covidx::run_training(c).report.dump();
      },
      py::arg("config"), py::arg("seed") = py::none());
  m.def(
      "write_synthetic_dataset",
      [](const std::filesystem::path& root, int per_class, int covid_high, int size, uint64_t seed) {
        covidx::write_synthetic_dataset(root, {per_class, covid_high, size, seed});
      },
      py::arg("root"), py::arg("per_class") = 60, py::arg("covid_high") = 30, py::arg("size") = 96,
      py::arg("seed") = 0);
}
