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

#include "covidx/datastore.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "covidx/errors.hpp"
#include "covidx/json_io.hpp"
#include "covidx/util.hpp"

namespace covidx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'O', 'V', 'I', 'D', 'X', 'B', '\n'};
constexpr size_t kDigestSize = 32;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool has_image_extension(const fs::path& p) {
  const std::string ext = lower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool has_image_signature(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  uint8_t head[8] = {};
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  const auto got = in.gcount();
  const bool png = got >= 8 && head[0] == 0x89 && head[1] == 'P' && head[2] == 'N' && head[3] == 'G';
  const bool jpeg = got >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF;
  return png || jpeg;
}

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void text(std::string_view s) { bytes({reinterpret_cast<const uint8_t*>(s.data()), s.size()}); }
  void f64s(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }

  std::vector<uint8_t>& buffer() { return buf_; }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t u8() { return take(1)[0]; }
  uint32_t u32() {
    const auto b = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    const auto b = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const uint8_t> take(size_t n) {
    if (n > data_.size() - pos_) throw IntegrityError("bundle truncated");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  size_t count(size_t elem_size) {
    const uint64_t n = u64();
    if (elem_size > 0 && n > (data_.size() - pos_) / elem_size) throw IntegrityError("bundle length field out of range");
    return static_cast<size_t>(n);
  }
  std::vector<double> f64s() {
    std::vector<double> v(count(8));
    for (double& x : v) x = f64();
    return v;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

void write_tree(ByteWriter& w, const DecisionTree& tree) {
  w.u64(tree.nodes.size());
  for (const TreeNode& n : tree.nodes) {
    w.i32(n.feature);
    w.f64(n.threshold);
    w.i32(n.left);
    w.i32(n.right);
    w.f64(n.value);
  }
}

DecisionTree read_tree(ByteReader& r) {
  DecisionTree tree;
  tree.nodes.resize(r.count(28));
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& n = tree.nodes[i];
    n.feature = r.i32();
    n.threshold = r.f64();
    n.left = r.i32();
    n.right = r.i32();
    n.value = r.f64();
    const auto limit = static_cast<int>(tree.nodes.size());
    if (!n.is_leaf() && (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) ||
                         n.left >= limit || n.right >= limit)) {
      throw IntegrityError("tree node links out of range");
    }
  }
  if (tree.nodes.empty()) throw IntegrityError("empty tree in bundle");
  return tree;
}

std::vector<uint8_t> model_payload(const TrainedModel& model) {
  ByteWriter w;
  w.u8(static_cast<uint8_t>(model.index()));
  if (const auto* svm = std::get_if<SvmModel>(&model)) {
    w.u64(static_cast<uint64_t>(svm->support_vectors.rows()));
    w.u64(static_cast<uint64_t>(svm->support_vectors.cols()));
    for (Eigen::Index i = 0; i < svm->support_vectors.size(); ++i) w.f64(svm->support_vectors.data()[i]);
    w.f64s(svm->alphas);
    for (int l : svm->labels) w.i32(l);
    w.f64(svm->bias);
    w.u8(svm->status == SolverStatus::kConverged ? 0 : 1);
    w.u64(svm->iterations);
  } else if (const auto* forest = std::get_if<ForestModel>(&model)) {
    w.u64(forest->trees.size());
    for (const auto& t : forest->trees) write_tree(w, t);
  } else {
    const auto& boost = std::get<BoostModel>(model);
    w.f64(boost.base_score);
    w.u64(boost.trees.size());
    for (const auto& t : boost.trees) write_tree(w, t);
  }
  return std::move(w.buffer());
}

std::vector<uint8_t> scaler_payload(const Scaler& s) {
  ByteWriter w;
  w.f64s(s.mean);
  w.f64s(s.std);
  return std::move(w.buffer());
}

Scaler read_scaler(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  Scaler s;
  s.mean = r.f64s();
  s.std = r.f64s();
  if (!r.done() || s.mean.size() != s.std.size()) throw IntegrityError("malformed scaler payload");
  return s;
}

TrainedModel read_model(std::span<const uint8_t> bytes, const LearnerConfig& config, Scaler scaler) {
  ByteReader r(bytes);
  const uint8_t kind = r.u8();
  if (kind != config.index()) throw IntegrityError("model payload kind disagrees with manifest");
  TrainedModel out;
  if (kind == 0) {
    SvmModel m;
    m.params = std::get<SvmParams>(config);
    m.scaler = std::move(scaler);
    const size_t rows = r.count(0);
    const size_t cols = r.count(0);
    if (cols != m.scaler.dim() || (cols > 0 && rows > bytes.size() / 8 / cols)) {
      throw IntegrityError("support vector block has wrong shape");
    }
    m.support_vectors.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.support_vectors.size(); ++i) m.support_vectors.data()[i] = r.f64();
    m.alphas = r.f64s();
    if (m.alphas.size() != rows) throw IntegrityError("alpha count disagrees with support vectors");
    m.labels.resize(rows);
    for (int& l : m.labels) l = r.i32();
    m.bias = r.f64();
    m.status = r.u8() == 0 ? SolverStatus::kConverged : SolverStatus::kIterationLimit;
    m.iterations = r.u64();
    out = std::move(m);
  } else if (kind == 1) {
    ForestModel m;
    m.params = std::get<ForestParams>(config);
    m.scaler = std::move(scaler);
    m.trees.resize(r.count(8));
    for (auto& t : m.trees) t = read_tree(r);
    if (m.trees.empty()) throw IntegrityError("forest without trees");
    out = std::move(m);
  } else if (kind == 2) {
    BoostModel m;
    m.params = std::get<BoostParams>(config);
    m.scaler = std::move(scaler);
    m.base_score = r.f64();
    m.trees.resize(r.count(8));
    for (auto& t : m.trees) t = read_tree(r);
    out = std::move(m);
  } else {
    throw IntegrityError("unknown model kind in bundle");
  }
  if (!r.done()) throw IntegrityError("trailing bytes in model payload");
  return out;
}

const Scaler& scaler_of(const TrainedModel& m) {
  return std::visit([](const auto& v) -> const Scaler& { return v.scaler; }, m);
}

json manifest_for(const CascadeModel& model) {
  json phases = json::array();
  for (int p = 0; p < kPhaseCount; ++p) {
    const PhaseSummary& s = model.summaries[p];
    json per_learner = json::object();
    for (const auto& [name, report] : s.per_learner) per_learner[name] = report;
    phases.push_back(json{{"task", phase_info(p).task},
                          {"negative", phase_info(p).negative},
                          {"positive", phase_info(p).positive},
                          {"learner", learner_name(model.phases[p])},
                          {"params", learner_to_json(config_of(model.phases[p]))},
                          {"selected", s.selected},
                          {"cv", s.cv},
                          {"per_learner", per_learner}});
  }
  json extractor = model.extractor_spec;
  extractor["id"] = model.extractor_id;
  return json{{"format_version", kBundleFormatVersion},
              {"extractor", extractor},
              {"prep", model.prep},
              {"prep_digest", model.prep_digest},
              {"phases", phases}};
}

}  // namespace

size_t DatasetManifest::total() const {
  size_t n = 0;
  for (const auto& [name, files] : classes) n += files.size();
  return n;
}

std::optional<Severity> DatasetManifest::severity_of(const fs::path& file) const {
  const auto it = severity.find(file.filename().string());
  if (it == severity.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, Severity> read_severity_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableFile("cannot open " + path.string());
  std::map<std::string, Severity> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw UnreadableFile(path.string() + ":" + std::to_string(line_no) + ": expected 'filename,severity'");
    }
    const std::string name = trim(line.substr(0, comma));
    const std::string value = lower(trim(line.substr(comma + 1)));
    if (line_no == 1 && lower(name) == "filename" && value == "severity") continue;
    if (value == "high") out[name] = Severity::kHigh;
    else if (value == "low") out[name] = Severity::kLow;
    else throw UnreadableFile(path.string() + ":" + std::to_string(line_no) + ": severity must be high or low");
  }
  return out;
}

DatasetManifest load_dataset(const fs::path& root, const LoadOptions& options) {
  DatasetManifest m;
  m.root = root;
  if (!fs::is_directory(root)) throw MissingClassDir("dataset root is not a directory: " + root.string());
  for (const std::string& name : options.class_names) {
    const fs::path dir = root / name;
    if (!fs::is_directory(dir)) throw MissingClassDir("missing class directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || !has_image_extension(entry.path())) continue;
      if (!has_image_signature(entry.path())) {
        throw UnreadableFile("not a readable PNG/JPEG file: " + entry.path().string());
      }
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    m.classes[name] = std::move(files);
  }
  const fs::path csv = root / "severity.csv";
  if (fs::exists(csv)) {
    m.severity = read_severity_csv(csv);
    m.has_severity_file = true;
  }
  if (options.require_severity) {
    const auto it = m.classes.find(options.severity_class);
    if (it != m.classes.end()) {
      for (const fs::path& f : it->second) {
        if (!m.severity_of(f)) throw SeverityGap("no severity entry for " + f.filename().string());
      }
    }
  }
  return m;
}

std::vector<uint8_t> serialize_bundle(const CascadeModel& model) {
  std::vector<std::pair<std::string, std::vector<uint8_t>>> payloads;
  for (int p = 0; p < kPhaseCount; ++p) {
    const std::string prefix = "phase" + std::to_string(p + 1);
    payloads.emplace_back(prefix + ".model", model_payload(model.phases[p]));
    payloads.emplace_back(prefix + ".scaler", scaler_payload(scaler_of(model.phases[p])));
  }
  json manifest = manifest_for(model);
  json table = json::array();
  for (const auto& [name, bytes] : payloads) {
    table.push_back(json{{"name", name}, {"size", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  manifest["payloads"] = table;
  const std::string manifest_text = manifest.dump(2);

  ByteWriter w;
  w.bytes({reinterpret_cast<const uint8_t*>(kMagic), sizeof(kMagic)});
  w.u32(kBundleFormatVersion);
  w.u64(manifest_text.size());
  w.text(manifest_text);
  w.u32(static_cast<uint32_t>(payloads.size()));
  for (const auto& [name, bytes] : payloads) {
    w.u32(static_cast<uint32_t>(name.size()));
    w.text(name);
    w.u64(bytes.size());
    w.bytes(bytes);
  }
  const Sha256 digest = sha256(w.buffer());
  w.bytes(digest);
  return std::move(w.buffer());
}

std::string bundle_digest(const CascadeModel& model) {
  const auto bytes = serialize_bundle(model);
  return to_hex(std::span(bytes).last(kDigestSize));
}

LoadedBundle parse_bundle(std::span<const uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) + 4 + kDigestSize ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError("not a COVIDX bundle");
  }
  const auto body = bytes.first(bytes.size() - kDigestSize);
  const auto trailer = bytes.last(kDigestSize);
  const Sha256 actual = sha256(body);
  if (!std::equal(actual.begin(), actual.end(), trailer.begin())) {
    throw IntegrityError("bundle digest mismatch");
  }

  ByteReader r(body);
  r.take(sizeof(kMagic));
  const uint32_t version = r.u32();
  if (version != kBundleFormatVersion) {
    throw VersionError("unsupported bundle format version " + std::to_string(version) +
                       " (this build reads " + std::to_string(kBundleFormatVersion) + ")");
  }
  const auto manifest_bytes = r.take(r.count(1));
  LoadedBundle out;
  try {
    out.manifest = json::parse(manifest_bytes.begin(), manifest_bytes.end());
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("bundle manifest is not valid JSON: ") + e.what());
  }

  std::map<std::string, std::span<const uint8_t>> payloads;
  const uint32_t n_payloads = r.u32();
  for (uint32_t i = 0; i < n_payloads; ++i) {
    const auto name = r.take(r.u32());
    const auto data = r.take(r.count(1));
    payloads[std::string(name.begin(), name.end())] = data;
  }
  if (!r.done()) throw IntegrityError("trailing bytes after payloads");

  try {
    const json& m = out.manifest;
    CascadeModel& model = out.model;
    model.extractor_spec = m.at("extractor").get<ExtractorSpec>();
    model.extractor_id = m.at("extractor").at("id").get<std::string>();
    model.prep = m.at("prep").get<PrepConfig>();
    model.prep_digest = m.at("prep_digest").get<std::string>();
    const json& phases = m.at("phases");
    if (phases.size() != kPhaseCount) throw IntegrityError("bundle must hold three phases");
    for (int p = 0; p < kPhaseCount; ++p) {
      const std::string prefix = "phase" + std::to_string(p + 1);
      const auto model_it = payloads.find(prefix + ".model");
      const auto scaler_it = payloads.find(prefix + ".scaler");
      if (model_it == payloads.end() || scaler_it == payloads.end()) {
        throw IntegrityError("bundle lacks payloads for " + prefix);
      }
      const LearnerConfig config = learner_from_json(phases[p].at("params"));
      model.phases[p] = read_model(model_it->second, config, read_scaler(scaler_it->second));
      PhaseSummary& s = model.summaries[p];
      s.selected = phases[p].value("selected", "");
      s.cv = phases[p].at("cv").get<EvalReport>();
      for (const auto& [name, report] : phases[p].at("per_learner").items()) {
        s.per_learner[name] = report.get<EvalReport>();
      }
    }
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("bundle manifest is incomplete: ") + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("bundle manifest has invalid settings: ") + e.what());
  }
  out.digest = to_hex(trailer);
  return out;
}

std::string save_bundle(const CascadeModel& model, const fs::path& path) {
  const auto bytes = serialize_bundle(model);
  write_file(path, bytes);
  return to_hex(std::span(bytes).last(kDigestSize));
}

LoadedBundle load_bundle(const fs::path& path) { return parse_bundle(read_file(path)); }

}  // namespace covidx
