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

// HTTP front end: POST /api/v1/predict, GET /api/v1/health, GET /api/v1/model.
// Uploads are processed in memory and never written to disk.

#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "covidx/cascade.hpp"
#include "covidx/datastore.hpp"
#include "covidx/features.hpp"

namespace httplib {
class Server;
}

namespace covidx {

inline constexpr size_t kMaxUploadBytes = 10u * 1024u * 1024u;

struct ServiceOptions {
  std::string cors_origin = "*";
  size_t max_upload_bytes = kMaxUploadBytes;
};

// JSON body of a successful prediction.
nlohmann::json prediction_to_json(const CascadeResult& result, const std::string& request_id,
                                  const std::string& model_digest, double timing_ms);

class PredictionService {
 public:
  explicit PredictionService(ServiceOptions options = {});
  ~PredictionService();
  PredictionService(const PredictionService&) = delete;
  PredictionService& operator=(const PredictionService&) = delete;

  // Loads the extractor named by the bundle and starts answering requests.
  // Safe to call while the server is running.
  void install(LoadedBundle bundle);
  void install(LoadedBundle bundle, std::shared_ptr<const Extractor> extractor);
  bool ready() const;

  // Blocking. Returns false when the socket could not be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); then call listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  // Stops accepting connections; in-flight requests complete.
  void stop();

 private:
  struct State {
    LoadedBundle bundle;
    std::shared_ptr<const Extractor> extractor;
  };

  std::shared_ptr<const State> state() const;
  void register_routes();

  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mu_;
  std::shared_ptr<const State> state_;
};

}  // namespace covidx
