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

// covidx: train, evaluate, predict, serve, synth.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 runtime error.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "covidx/datastore.hpp"
#include "covidx/errors.hpp"
#include "covidx/pipeline.hpp"
#include "covidx/service.hpp"
#include "covidx/synth.hpp"
#include "covidx/util.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int exit_code_for(covidx::ErrorKind kind) {
  switch (kind) {
    case covidx::ErrorKind::kConfig: return kExitConfig;
    case covidx::ErrorKind::kData: return kExitData;
    case covidx::ErrorKind::kRuntime: return kExitRuntime;
  }
  return kExitRuntime;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_train(const std::string& config_path, std::optional<uint64_t> seed,
              std::optional<std::string> extractor) {
  covidx::RunConfig config = covidx::load_run_config(config_path);
  if (seed) config.seed = *seed;
  if (extractor) config.extractor = covidx::extractor_from_flag(*extractor);
  const covidx::TrainOutcome out = covidx::run_training(config);
  std::cout << "bundle\t" << config.bundle_path.string() << "\n"
            << "digest\t" << out.digest << "\n"
            << "report\t" << config.report_path.string() << "\n";
  for (int p = 0; p < covidx::kPhaseCount; ++p) {
    std::cout << covidx::phase_info(p).task << "\t" << out.model.summaries[p].selected << "\n";
  }
  std::cout << "heldout_macro_f1\t" << format_score(out.report["heldout"]["macro_f1"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& bundle_path, const std::string& data, const std::string& out_path) {
  const covidx::LoadedBundle bundle = covidx::load_bundle(bundle_path);
  const json report = covidx::run_evaluation(bundle, data);
  const std::string text = report.dump(2) + "\n";
  if (!out_path.empty()) covidx::write_file(out_path, text);
  std::cout << text;
  return kExitOk;
}

int cmd_predict(const std::string& bundle_path, const std::vector<std::string>& images) {
  const covidx::LoadedBundle bundle = covidx::load_bundle(bundle_path);
  const auto extractor = covidx::load_extractor(bundle.model.extractor_spec);
  int failures = 0;
  for (const std::string& path : images) {
    try {
      const covidx::CascadeResult r = covidx::cascade_predict(bundle.model, *extractor, covidx::read_file(path));
      std::string scores = "phase1=" + format_score(r.phase1_score);
      if (r.phase2_score) scores += " phase2=" + format_score(*r.phase2_score);
      if (r.phase3_score) scores += " phase3=" + format_score(*r.phase3_score);
      std::cout << path << '\t' << covidx::to_string(r.final_label) << '\t' << scores << '\n';
    } catch (const covidx::ExtractorMismatch&) {
      throw;
    } catch (const covidx::Error& e) {
      ++failures;
      std::cerr << path << "\terror\t" << e.code() << ": " << e.what() << '\n';
    }
  }
  std::cout.flush();
  return failures > 0 ? kExitData : kExitOk;
}

int cmd_serve(std::string bundle_path, const std::string& host, int port, const std::string& cors) {
  if (const char* env = std::getenv("COVIDX_BUNDLE"); env && *env) bundle_path = env;
  if (bundle_path.empty()) throw covidx::ConfigError("serve needs --bundle or COVIDX_BUNDLE");

  // Signals are taken synchronously by a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  covidx::ServiceOptions options;
  options.cors_origin = cors;
  covidx::PredictionService service(options);

  int bound = port;
  if (port == 0) {
    bound = service.bind_any_port(host);
    if (bound < 0) throw covidx::ConfigError("cannot bind " + host);
  }
  bool listen_ok = true;
  std::thread server([&] { listen_ok = port == 0 ? service.listen_after_bind() : service.listen(host, port); });
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "covidx: shutting down\n";
    service.stop();
  });

  int rc = kExitOk;
  try {
    service.install(covidx::load_bundle(bundle_path));
    std::cerr << "covidx: serving " << bundle_path << " on http://" << host << ":" << bound << "\n";
  } catch (const covidx::Error& e) {
    std::cerr << "covidx: " << e.code() << ": " << e.what() << "\n";
    rc = exit_code_for(e.kind());
    service.stop();
  }
  server.join();
  // Wake the signal thread if the server ended on its own.
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  if (rc == kExitOk && !listen_ok) {
    std::cerr << "covidx: cannot listen on " << host << ":" << port << "\n";
    return kExitConfig;
  }
  return rc;
}

int cmd_synth(const std::string& out, const covidx::SynthOptions& options) {
  covidx::write_synthetic_dataset(out, options);
  std::cout << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"COVIDX chest X-ray triage: healthy, pneumonia, COVID-19 severity"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> extractor;
  auto* train = app.add_subcommand("train", "Grid search, cross-validate and fit the three phases");
  train->add_option("--config", config_path, "Run configuration (JSON)")->required();
  train->add_option("--seed", seed, "Overrides the config seed");
  train->add_option("--extractor", extractor, "baseline or an ONNX graph path");

  std::string bundle_path, data_root, out_path;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a bundle on a labelled dataset");
  evaluate->add_option("--bundle", bundle_path, "Model bundle")->required();
  evaluate->add_option("--data", data_root, "Dataset root")->required();
  evaluate->add_option("--out", out_path, "Also write the report here");

  std::vector<std::string> images;
  auto* predict = app.add_subcommand("predict", "Staged verdict for each image");
  predict->add_option("--bundle", bundle_path, "Model bundle")->required();
  predict->add_option("images", images, "PNG or JPEG files")->required();

  std::string host = "127.0.0.1";
  std::string cors = "*";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP prediction service");
  serve->add_option("--bundle", bundle_path, "Model bundle (COVIDX_BUNDLE overrides)");
  serve->add_option("--port", port, "0 picks a free port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");

  covidx::SynthOptions synth_opts;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic texture dataset");
  synth->add_option("--out", synth_out, "Output root")->required();
  synth->add_option("--per-class", synth_opts.per_class, "Images per class");
  synth->add_option("--covid-high", synth_opts.covid_high, "High-severity COVID-19 images");
  synth->add_option("--size", synth_opts.size, "Image side in pixels");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(config_path, seed, extractor);
    if (evaluate->parsed()) return cmd_evaluate(bundle_path, data_root, out_path);
    if (predict->parsed()) return cmd_predict(bundle_path, images);
    if (serve->parsed()) return cmd_serve(bundle_path, host, port, cors);
    if (synth->parsed()) return cmd_synth(synth_out, synth_opts);
  } catch (const covidx::Error& e) {
    std::cerr << "covidx: " << e.code() << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::invalid_argument& e) {
    std::cerr << "covidx: invalid_argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "covidx: runtime_error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
