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

#include "covidx/service.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <random>

#include <httplib.h>

#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"

namespace covidx {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", code}, {"message", message}}.dump(), kJson);
}

std::string new_request_id() {
  static std::atomic<uint64_t> counter{0};
  static const uint64_t prefix = std::random_device{}();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%08llx-%08llx", static_cast<unsigned long long>(prefix & 0xFFFFFFFFu),
                static_cast<unsigned long long>(++counter));
  return buf;
}

json phase_json(int phase, double score, bool positive) {
  const PhaseInfo& info = phase_info(phase);
  return json{{"label", positive ? info.positive : info.negative}, {"score", score}};
}

}  // namespace

json prediction_to_json(const CascadeResult& result, const std::string& request_id,
                        const std::string& model_digest, double timing_ms) {
  const bool unhealthy = result.phase2_score.has_value();
  const bool covid = result.phase3_score.has_value();
  json out{{"request_id", request_id},
           {"phase1", phase_json(0, result.phase1_score, unhealthy)},
           {"phase2", nullptr},
           {"phase3", nullptr},
           {"final_label", to_string(result.final_label)},
           {"model_digest", model_digest},
           {"timing_ms", timing_ms}};
  if (unhealthy) out["phase2"] = phase_json(1, *result.phase2_score, covid);
  if (covid) {
    out["phase3"] = phase_json(2, *result.phase3_score, result.final_label == FinalLabel::kCovidHigh);
  }
  return out;
}

PredictionService::PredictionService(ServiceOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  register_routes();
}

PredictionService::~PredictionService() { stop(); }

void PredictionService::install(LoadedBundle bundle) {
  auto extractor = load_extractor(bundle.model.extractor_spec);
  install(std::move(bundle), std::move(extractor));
}

void PredictionService::install(LoadedBundle bundle, std::shared_ptr<const Extractor> extractor) {
  if (extractor->id() != bundle.model.extractor_id) {
    throw ExtractorMismatch("bundle expects extractor '" + bundle.model.extractor_id + "' but '" +
                            extractor->id() + "' was loaded");
  }
  auto next = std::make_shared<const State>(State{std::move(bundle), std::move(extractor)});
  std::lock_guard<std::mutex> lock(mu_);
  state_ = std::move(next);
}

bool PredictionService::ready() const { return state() != nullptr; }

std::shared_ptr<const PredictionService::State> PredictionService::state() const {
  std::lock_guard<std::mutex> lock(mu_);
  return state_;
}

void PredictionService::register_routes() {
  httplib::Server& svr = *server_;
  // Multipart framing adds a little on top of the image itself.
  svr.set_payload_max_length(options_.max_upload_bytes + 64 * 1024);
  svr.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});

  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    switch (res.status) {
      case 413: send_error(res, 413, "payload_too_large", "upload exceeds the size limit"); break;
      case 404: send_error(res, 404, "not_found", "no such endpoint"); break;
      default: send_error(res, res.status, "bad_request", "request could not be processed"); break;
    }
    return httplib::Server::HandlerResponse::Handled;
  });

  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    } catch (...) {
      send_error(res, 500, "internal_error", "unknown failure");
    }
  });

  svr.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  svr.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    const auto s = state();
    if (!s) {
      res.status = 503;
      res.set_content(json{{"status", "loading"}, {"model_digest", nullptr}}.dump(), kJson);
      return;
    }
    res.set_content(json{{"status", "ok"}, {"model_digest", s->bundle.digest}}.dump(), kJson);
  });

  svr.Get("/api/v1/model", [this](const httplib::Request&, httplib::Response& res) {
    const auto s = state();
    if (!s) return send_error(res, 503, "model_not_loaded", "no model bundle loaded yet");
    const json& m = s->bundle.manifest;
    json phases = json::array();
    for (const json& p : m.at("phases")) {
      json metrics = json::object();
      for (const auto& [name, summary] : p.at("cv").at("metrics").items()) {
        metrics[name] = json{{"mean", summary.at("mean")}, {"std", summary.at("std")}};
      }
      phases.push_back(json{{"task", p.at("task")},
                            {"learner", p.at("learner")},
                            {"params", p.at("params")},
                            {"cv_metrics", metrics}});
    }
    res.set_content(json{{"model_digest", s->bundle.digest},
                         {"format_version", m.at("format_version")},
                         {"extractor_id", s->bundle.model.extractor_id},
                         {"extractor", m.at("extractor")},
                         {"prep", m.at("prep")},
                         {"phases", phases}}
                        .dump(),
                    kJson);
  });

  svr.Post("/api/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
    const auto start = std::chrono::steady_clock::now();
    const auto s = state();
    if (!s) return send_error(res, 503, "model_not_loaded", "no model bundle loaded yet");
    if (!req.is_multipart_form_data()) {
      return send_error(res, 400, "malformed_request", "expected multipart/form-data");
    }
    if (!req.has_file("image")) return send_error(res, 400, "missing_image", "form field 'image' is required");
    const httplib::MultipartFormData file = req.get_file_value("image");
    if (file.content.size() > options_.max_upload_bytes) {
      return send_error(res, 413, "payload_too_large", "upload exceeds the size limit");
    }
    const std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(file.content.data()),
                                         file.content.size());
    CascadeResult result;
    try {
      result = cascade_predict(s->bundle.model, *s->extractor, bytes);
    } catch (const DecodeError& e) {
      return send_error(res, 400, e.code(), e.what());
    } catch (const Error& e) {
      return send_error(res, 500, e.code(), e.what());
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res.set_content(prediction_to_json(result, new_request_id(), s->bundle.digest, ms).dump(), kJson);
  });
}

bool PredictionService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int PredictionService::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool PredictionService::listen_after_bind() { return server_->listen_after_bind(); }

void PredictionService::wait_until_ready() const { server_->wait_until_ready(); }

void PredictionService::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace covidx
