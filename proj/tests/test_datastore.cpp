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

#include <fstream>

#include "covidx/datastore.hpp"
#include "covidx/errors.hpp"
#include "covidx/util.hpp"
#include "support/fixtures.hpp"
#include "support/toy_model.hpp"

namespace covidx {
namespace {

namespace fs = std::filesystem;

void write_png(const fs::path& path, int seed) {
  Rng rng(static_cast<uint64_t>(seed));
  fs::create_directories(path.parent_path());
  write_file(path, encode_png(testing::random_image(rng, 16, 16)));
}

TEST(LoadDatasetTest, TwoClassesThreeFilesEach) {
  testing::TempDir dir;
  for (const char* cls : {"a", "b"})
    for (const char* f : {"z.png", "m.png", "a.png"}) write_png(dir / cls / f, 1);
  write_file(dir / "a" / "notes.txt", std::string_view("skip"));
  LoadOptions opts;
  opts.class_names = {"a", "b"};
  const DatasetManifest m = load_dataset(dir.path(), opts);
  EXPECT_EQ(m.total(), 6u);
  EXPECT_EQ(m.classes.at("a").size(), 3u);
  EXPECT_EQ(m.classes.at("b").size(), 3u);
  EXPECT_EQ(m.classes.at("a").front().filename(), "a.png");
  EXPECT_EQ(m.classes.at("a").back().filename(), "z.png");
  EXPECT_FALSE(m.has_severity_file);
}

TEST(LoadDatasetTest, MissingClassDirectory) {
  testing::TempDir dir;
  write_png(dir / "healthy" / "x.png", 1);
  EXPECT_THROW(load_dataset(dir.path()), MissingClassDir);
  EXPECT_THROW(load_dataset(dir / "nowhere"), MissingClassDir);
}

TEST(LoadDatasetTest, UnreadableImage) {
  testing::TempDir dir;
  for (const char* cls : {"healthy", "pneumonia", "covid"}) write_png(dir / cls / "x.png", 1);
  write_file(dir / "pneumonia" / "bad.png", std::string_view("not a png"));
  EXPECT_THROW(load_dataset(dir.path()), UnreadableFile);
}

TEST(LoadDatasetTest, SeverityCoverage) {
  testing::TempDir dir;
  for (const char* cls : {"healthy", "pneumonia"}) write_png(dir / cls / "x.png", 1);
  for (const char* f : {"c1.png", "c2.png", "c3.png"}) write_png(dir / "covid" / f, 2);
  write_file(dir / "severity.csv", std::string_view("filename,severity\nc1.png,high\nc2.png, LOW \n"));
  LoadOptions opts;
  const DatasetManifest loose = load_dataset(dir.path(), opts);
  EXPECT_TRUE(loose.has_severity_file);
  EXPECT_EQ(loose.severity_of("covid/c1.png"), Severity::kHigh);
  EXPECT_EQ(loose.severity_of("c2.png"), Severity::kLow);
  EXPECT_FALSE(loose.severity_of("c3.png"));
  opts.require_severity = true;
  EXPECT_THROW(load_dataset(dir.path(), opts), SeverityGap);
  write_file(dir / "severity.csv", std::string_view("c1.png,high\nc2.png,low\nc3.png,high\n"));
  EXPECT_NO_THROW(load_dataset(dir.path(), opts));
  write_file(dir / "severity.csv", std::string_view("c1.png,medium\n"));
  EXPECT_THROW(load_dataset(dir.path(), opts), UnreadableFile);
}

class BundleTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    CascadeSpec spec = testing::linear_spec();
    ForestParams f;
    f.n_trees = 4;
    BoostParams b;
    b.n_rounds = 5;
    spec.grids[1] = {f};
    spec.grids[2] = {b};
    model_ = new CascadeModel(testing::toy_model(spec));
  }
  static void TearDownTestSuite() { delete model_; }
  static CascadeModel* model_;
};
CascadeModel* BundleTest::model_ = nullptr;

TEST_F(BundleTest, RoundTripPredictsIdentically) {
  testing::TempDir dir;
  const fs::path path = dir / "m.covidx";
  const std::string digest = save_bundle(*model_, path);
  EXPECT_EQ(digest, bundle_digest(*model_));
  const LoadedBundle loaded = load_bundle(path);
  EXPECT_EQ(loaded.digest, digest);
  EXPECT_EQ(loaded.model.extractor_id, model_->extractor_id);
  EXPECT_EQ(loaded.model.prep, model_->prep);
  EXPECT_EQ(serialize_bundle(loaded.model), serialize_bundle(*model_));
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(3);
    for (double& v : x) v = rng.uniform() * 4 - 2;
    EXPECT_EQ(cascade_predict_features(loaded.model, x), cascade_predict_features(*model_, x));
  }
  EXPECT_EQ(loaded.manifest.at("phases").size(), 3u);
}

TEST_F(BundleTest, AnyFlippedByteIsAnIntegrityError) {
  const std::vector<uint8_t> bytes = serialize_bundle(*model_);
  Rng rng(8);
  for (int t = 0; t < 40; ++t) {
    std::vector<uint8_t> bad = bytes;
    bad[rng.uniform_index(bad.size())] ^= static_cast<uint8_t>(1 + rng.uniform_index(255));
    EXPECT_THROW(parse_bundle(bad), IntegrityError);
  }
  std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 5);
  EXPECT_THROW(parse_bundle(truncated), IntegrityError);
  EXPECT_THROW(parse_bundle(std::vector<uint8_t>{}), IntegrityError);
}

TEST_F(BundleTest, FutureVersionRejected) {
  std::vector<uint8_t> bytes = serialize_bundle(*model_);
  bytes[8] = static_cast<uint8_t>(kBundleFormatVersion + 1);
  const Sha256 trailer = sha256(std::span<const uint8_t>(bytes.data(), bytes.size() - 32));
  std::copy(trailer.begin(), trailer.end(), bytes.end() - 32);
  EXPECT_THROW(parse_bundle(bytes), VersionError);
}

TEST_F(BundleTest, MissingFile) {
  EXPECT_THROW(load_bundle("/nonexistent/m.covidx"), UnreadableFile);
}

}  // namespace
}  // namespace covidx
