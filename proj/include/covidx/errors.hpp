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

#pragma once

#include <stdexcept>
#include <string>

namespace covidx {

// Broad failure families. The CLI maps them onto process exit codes.
enum class ErrorKind { kConfig, kData, kRuntime };

class Error : public std::runtime_error {
 public:
  Error(std::string code, ErrorKind kind, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), kind_(kind) {}

  // Stable machine-readable identifier, e.g. "decode_failed".
  const std::string& code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string code_;
  ErrorKind kind_;
};

#define COVIDX_DEFINE_ERROR(Name, code, kind)                  \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& message)                  \
        : Error(code, ErrorKind::kind, message) {}             \
  };

COVIDX_DEFINE_ERROR(DecodeError, "decode_failed", kData)
COVIDX_DEFINE_ERROR(GraphLoadError, "graph_load_failed", kConfig)
COVIDX_DEFINE_ERROR(ShapeError, "bad_graph_shape", kConfig)
COVIDX_DEFINE_ERROR(InferenceError, "inference_failed", kRuntime)
COVIDX_DEFINE_ERROR(DimensionError, "dimension_mismatch", kData)
COVIDX_DEFINE_ERROR(ClassTooSmall, "class_too_small", kData)
COVIDX_DEFINE_ERROR(SingleClassError, "single_class", kData)
COVIDX_DEFINE_ERROR(NoPositivesError, "no_positives", kData)
COVIDX_DEFINE_ERROR(MissingClassDir, "missing_class_dir", kData)
COVIDX_DEFINE_ERROR(UnreadableFile, "unreadable_file", kData)
COVIDX_DEFINE_ERROR(SeverityGap, "severity_gap", kData)
COVIDX_DEFINE_ERROR(IntegrityError, "integrity_error", kData)
COVIDX_DEFINE_ERROR(VersionError, "version_error", kData)
COVIDX_DEFINE_ERROR(ExtractorMismatch, "extractor_mismatch", kConfig)
COVIDX_DEFINE_ERROR(ConfigError, "config_error", kConfig)

#undef COVIDX_DEFINE_ERROR

}  // namespace covidx
