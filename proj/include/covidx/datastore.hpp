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

// Directory-per-class dataset ingestion and the .covidx model bundle.
//
// Bundle layout (all integers little-endian):
//
//   "COVIDXB\n"                    8-byte magic
//   u32  format_version
//   u64  manifest length, then UTF-8 JSON manifest
//   u32  payload count
//   per payload: u32 name length, name, u64 size, raw bytes
//   32-byte SHA-256 of every preceding byte
//
// The digest is checked before the version so that any corrupted byte
// surfaces as IntegrityError.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covidx/cascade.hpp"

namespace covidx {

inline constexpr uint32_t kBundleFormatVersion = 1;
inline constexpr const char* kBundleExtension = ".covidx";

struct DatasetManifest {
  std::filesystem::path root;
  // Class name -> image files in lexicographic order.
  std::map<std::string, std::vector<std::filesystem::path>> classes;
  // Filename (no directory) -> severity, from severity.csv when present.
  std::map<std::string, Severity> severity;
  bool has_severity_file = false;

  size_t total() const;
  std::optional<Severity> severity_of(const std::filesystem::path& file) const;
};

struct LoadOptions {
  std::vector<std::string> class_names = {"healthy", "pneumonia", "covid"};
  // Require a severity entry for every file of `severity_class`.
  bool require_severity = false;
  std::string severity_class = "covid";
};

// Throws MissingClassDir, UnreadableFile, SeverityGap.
DatasetManifest load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

// `filename,severity` with severity in {high, low}. Throws UnreadableFile.
std::map<std::string, Severity> read_severity_csv(const std::filesystem::path& path);

std::vector<uint8_t> serialize_bundle(const CascadeModel& model);
// Hex SHA-256 trailer of the serialized bundle.
std::string bundle_digest(const CascadeModel& model);

struct LoadedBundle {
  CascadeModel model;
  std::string digest;
  nlohmann::json manifest;
};

// Throws IntegrityError, VersionError.
LoadedBundle parse_bundle(std::span<const uint8_t> bytes);

// Returns the digest.
std::string save_bundle(const CascadeModel& model, const std::filesystem::path& path);
LoadedBundle load_bundle(const std::filesystem::path& path);

}  // namespace covidx
