// Copyright 2026 The chainbreak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end; talks to the library only through chainbreak.h.

#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chainbreak/chainbreak.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;

struct CbError {
  cb_status status;
  std::string message;
};

void check(cb_status status) {
  if (status != CB_OK) throw CbError{status, cb_last_error()};
}

struct ConfigDeleter {
  void operator()(cb_config* c) const { cb_config_free(c); }
};
struct ReportDeleter {
  void operator()(cb_report* r) const { cb_report_free(r); }
};
struct SweepDeleter {
  void operator()(cb_sweep* s) const { cb_sweep_free(s); }
};
using ConfigPtr = std::unique_ptr<cb_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<cb_report, ReportDeleter>;
using SweepPtr = std::unique_ptr<cb_sweep, SweepDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  cb_string_free(s);
  return out;
}

// Options shared by the experiment-running subcommands.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<long long> workers;
  std::optional<long long> seed;
  std::optional<long long> paths;
  std::string csv;
  std::string json;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "TOML experiment file")
        ->check(CLI::ExistingFile);
    app->add_option("-s,--set", overrides,
                    "Override a config key, e.g. --set eps=1e-3 (repeatable)");
    app->add_option("-w,--workers", workers, "Worker threads");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("-n,--paths", paths, "Number of paths");
    app->add_option("--csv", csv, "Per-path CSV output");
    app->add_option("--json", json, "Summary JSON output");
    app->add_flag("-q,--quiet", quiet, "Do not print the summary");
  }

  // Starts from the file (or `recipe`, or defaults) and applies the flags.
  ConfigPtr build(const char* recipe = nullptr) const {
    cb_config* raw = nullptr;
    if (!config_path.empty())
      check(cb_config_from_file(config_path.c_str(), &raw));
    else if (recipe)
      check(cb_config_law_recipe(recipe, &raw));
    else
      check(cb_config_new(&raw));
    ConfigPtr config(raw);
    for (const auto& o : overrides) check(cb_config_apply(config.get(), o.c_str()));
    auto set = [&](const char* key, const std::string& value) {
      check(cb_config_set(config.get(), key, value.c_str()));
    };
    if (workers) set("workers", std::to_string(*workers));
    if (seed) set("master_seed", std::to_string(*seed));
    if (paths) set("n_paths", std::to_string(*paths));
    if (!csv.empty()) set("csv_out", "\"" + csv + "\"");
    if (!json.empty()) set("json_out", "\"" + json + "\"");
    check(cb_config_validate(config.get()));
    return config;
  }
};

int report_verdict(const cb_report* report, bool quiet) {
  if (!quiet) {
    char* json = nullptr;
    check(cb_report_summary_json(report, &json));
    std::cout << take(json) << "\n";
  }
  int passed = 0;
  check(cb_report_passed(report, &passed));
  return passed ? kExitPass : kExitThreshold;
}

int run_simulate(const CommonOptions& common) {
  ConfigPtr config = common.build();
  cb_report* raw = nullptr;
  check(cb_run(config.get(), &raw));
  ReportPtr report(raw);
  return report_verdict(report.get(), common.quiet);
}

int run_verify_law(const CommonOptions& common, const std::string& system) {
  ConfigPtr config = common.build(system.c_str());
  check(cb_config_use_law_thresholds(config.get()));
  cb_report* raw = nullptr;
  check(cb_run(config.get(), &raw));
  ReportPtr report(raw);
  return report_verdict(report.get(), common.quiet);
}

int run_sweep(const CommonOptions& common, const std::string& axis,
              const std::vector<double>& values) {
  ConfigPtr config = common.build();
  cb_sweep* raw = nullptr;
  check(cb_sweep_run(config.get(), axis.c_str(), values.data(), values.size(),
                     &raw));
  SweepPtr sweep(raw);
  int verdict = kExitPass;
  for (std::size_t i = 0; i < cb_sweep_size(sweep.get()); ++i) {
    const cb_report* r = cb_sweep_report(sweep.get(), i);
    if (report_verdict(r, common.quiet) != kExitPass) verdict = kExitThreshold;
  }
  return verdict;
}

int run_verify_scaling(const CommonOptions& common, double ks_max) {
  ConfigPtr config = common.build("scaling");
  char* json = nullptr;
  int passed = 0;
  check(cb_verify_scaling(config.get(), ks_max, &json, &passed));
  const std::string text = take(json);
  if (!common.quiet) std::cout << text << "\n";
  if (!common.json.empty()) {
    std::ofstream out(common.json);
    out << text << "\n";
  }
  return passed ? kExitPass : kExitThreshold;
}

int run_oracle(const CommonOptions& common, const std::vector<double>& times,
               const std::string& out_path) {
  ConfigPtr config = common.build();
  char* csv = nullptr;
  check(cb_oracle_table(config.get(), times.empty() ? nullptr : times.data(),
                        times.size(), &csv));
  const std::string text = take(csv);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw CbError{CB_ERR_IO, "cannot write " + out_path};
    out << text;
  }
  return kExitPass;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run_check_regime(double eps, double sigma) {
  cb_regime r{};
  check(cb_check_regime(eps, sigma, &r));
  std::cout << "{\"ratio\": " << fmt(r.ratio) << ", \"vanish3\": "
            << fmt(r.vanish3) << ", \"vanish15\": " << fmt(r.vanish15)
            << ", \"vanish1\": " << fmt(r.vanish1) << ", \"nonlinear\": \""
            << r.nonlinear << "\", \"linear_timevarying\": \""
            << r.linear_timevarying << "\", \"linear_constant\": \""
            << r.linear_constant << "\"}\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Break times of a slowly pulled Brownian particle chain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cb_version()));

  CommonOptions sim_opts, sweep_opts, law_opts, scaling_opts, oracle_opts;

  auto* simulate = app.add_subcommand("simulate", "Run one experiment");
  sim_opts.attach(simulate);

  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value");
  sweep_opts.attach(sweep);
  std::string axis;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "eps, sigma, d, b_break or n_paths")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  auto* law = app.add_subcommand("verify-law",
                                 "Check the Gumbel break-time and position laws");
  law_opts.attach(law);
  std::string system = "linear-constant";
  law->add_option("--system", system,
                  "linear-constant, linear-timevarying, nonlinear or coupled")
      ->capture_default_str();

  auto* scaling = app.add_subcommand(
      "verify-scaling", "Compare against the reduced standard problem");
  scaling_opts.attach(scaling);
  double ks_max = 0.04;
  scaling->add_option("--ks-max", ks_max, "Two-sample KS limit")
      ->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Emit covariance oracle tables");
  oracle_opts.attach(oracle);
  std::vector<double> times;
  std::string oracle_out;
  oracle->add_option("--times", times, "Comma-separated times")->delimiter(',');
  oracle->add_option("-o,--out", oracle_out, "CSV output (default stdout)");

  auto* regime = app.add_subcommand("check-regime",
                                    "Report the small-noise regime quantities");
  double eps = 0.0, sigma = 0.0;
  regime->add_option("--eps", eps, "Pulling speed")->required();
  regime->add_option("--sigma", sigma, "Noise strength")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (*simulate) return run_simulate(sim_opts);
    if (*sweep) return run_sweep(sweep_opts, axis, values);
    if (*law) return run_verify_law(law_opts, system);
    if (*scaling) return run_verify_scaling(scaling_opts, ks_max);
    if (*oracle) return run_oracle(oracle_opts, times, oracle_out);
    if (*regime) return run_check_regime(eps, sigma);
  } catch (const CbError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
