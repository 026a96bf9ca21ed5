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

#ifndef CHAINBREAK_EXPERIMENT_HPP_
#define CHAINBREAK_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainbreak/engine.hpp"
#include "chainbreak/model.hpp"
#include "chainbreak/scaling.hpp"

namespace chainbreak {

enum class SystemKind { kNonlinear, kLinearConstant, kLinearTimeVarying, kCoupled };

std::string_view system_name(SystemKind kind);
SystemKind parse_system(std::string_view name);

// Pass/fail limits applied to a report; unset entries are not checked.
struct Thresholds {
  std::optional<double> ks_max;
  std::optional<double> link_ks_max;
  std::optional<double> position_tol;
  // Coupled runs: P(S* >= s_star_level) must not exceed s_star_prob_max.
  double s_star_level = 0.1;
  std::optional<double> s_star_prob_max;
};

struct ExperimentConfig {
  ChainParams chain;
  std::string potential = "quadratic:u=1";
  SystemKind system = SystemKind::kLinearConstant;
  // Curvature of the linear-constant system; U''(b) when unset.
  std::optional<double> u_curv;
  // Grid: the "auto" policy, with any explicitly set entry overriding it.
  std::optional<double> coarse_dt;
  std::optional<double> fine_dt;
  std::optional<double> window_W;
  // Divides the auto fine_dt (ignored when fine_dt is set).
  double fine_refine = 1.0;
  double horizon = kInfiniteHorizon;  // only used when eps == 0
  std::int64_t n_paths = 1000;
  std::uint64_t master_seed = 42;
  int workers = 1;
  bool track_all_links = true;
  std::vector<double> r_candidates = default_margin_candidates();
  Thresholds thresholds;
  std::string csv_out;
  std::string json_out;

  void validate() const;
};

ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(std::string_view toml_text);
// Applies one `key=value` assignment with the config-file key names.
void apply_override(ExperimentConfig& config, std::string_view assignment);
void set_key(ExperimentConfig& config, const std::string& key,
             std::string_view value);

// Potential after validation on [1, b + r] for the configured candidates.
Potential resolve_potential(const ExperimentConfig& config);
engine::SimGrid resolve_grid(const ExperimentConfig& config,
                             const PotentialBounds& bounds);

struct RegimeReport {
  double ratio = 0.0;     // sigma / eps
  double vanish3 = 0.0;   // sigma^2 |ln eps|^3   (nonlinear chain)
  double vanish15 = 0.0;  // sigma^2 |ln eps|^1.5 (time-varying linear chain)
  double vanish1 = 0.0;   // sigma^2 |ln eps|     (constant linear chain)
  std::string nonlinear;  // "comfortable", "marginal" or "outside"
  std::string linear_timevarying;
  std::string linear_constant;

  bool operator==(const RegimeReport&) const = default;
};

RegimeReport check_regime(const ChainParams& params);

struct PathRow {
  std::int64_t path_index = 0;
  double tau = 0.0;
  int link = 0;
  bool censored = false;
  double normalized_tau = 0.0;  // NaN when undefined
};

struct EcdfPoint {
  double r = 0.0;
  double empirical = 0.0;
  double gumbel = 0.0;

  bool operator==(const EcdfPoint&) const = default;
};

struct ReportSummary {
  std::string system;
  int d = 0;
  double eps = 0.0;
  double sigma = 0.0;
  double b_break = 0.0;
  double u_curv = 0.0;
  double t_star = 0.0;
  double gumbel_a = 0.0;
  double gumbel_b = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t n_uncensored = 0;
  std::int64_t n_censored = 0;
  std::int64_t n_escaped = 0;
  std::int64_t bound_violations = 0;  // uncensored paths with tau > t*
  std::optional<double> ks;
  std::vector<std::optional<double>> link_ks;
  std::vector<double> link_ks_samples;  // sample size behind each link_ks
  std::vector<std::int64_t> position_counts;
  std::vector<double> position_freq;
  std::vector<double> position_probs;
  std::optional<double> position_chisq;
  std::optional<double> mean_normalized_tau;
  std::optional<RegimeReport> regime;  // absent unless 0 < eps < 1
  std::vector<EcdfPoint> ecdf;
  std::optional<double> s_star_mean;
  std::optional<double> s_star_max;
  std::optional<double> s_star_exceed_prob;
  std::optional<double> m_star_mean;
  std::string digest;  // FNV-1a over all break events, hex
  bool passed = true;
  std::vector<std::string> failures;

  bool operator==(const ReportSummary&) const = default;
};

struct ExperimentReport {
  std::vector<PathRow> rows;
  // Per-link first hitting times (NaN when unreached), row-aligned.
  std::vector<std::vector<double>> link_times;
  std::vector<double> s_star;  // coupled runs only
  std::vector<std::string> escapes;
  ReportSummary summary;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

enum class SweepAxis { kEps, kSigma, kD, kBBreak, kNPaths };
SweepAxis parse_sweep_axis(std::string_view name);

// One report per value with the shared master seed. Output paths get a
// `_<axis>_<value>` suffix before their extension.
std::vector<ExperimentReport> sweep(const ExperimentConfig& base,
                                    SweepAxis axis,
                                    const std::vector<double>& values);

std::string rows_csv(const ExperimentReport& report);
std::string summary_json(const ReportSummary& summary, int indent = 2);
ReportSummary parse_summary_json(std::string_view text);

void write_text_file(const std::string& path, const std::string& contents);
void write_outputs(const ExperimentConfig& config,
                   const ExperimentReport& report);

// Preset verification runs: "linear-constant", "linear-timevarying",
// "nonlinear" and "coupled" reproduce the break-law checks, "scaling" the
// reduction to the standard problem (for verify_scaling).
ExperimentConfig law_recipe(std::string_view name);

// Fills the unset thresholds with the limit-law tolerances for the
// configured system: KS 0.15, per-link KS 0.2 and positions +-0.05 for the
// constant linear chain; KS 0.2 and positions +-0.07 otherwise;
// P(S* >= 0.1) <= 0.05 for coupled runs.
ExperimentConfig with_law_thresholds(ExperimentConfig config);

// Break times of the general problem (quadratic u, b, eps, sigma) against
// time_factor times those of the reduced standard problem, on grids scaled by
// u and with independent seeds.
struct ScalingCheck {
  double u_curv = 0.0;
  double b_break = 0.0;
  scaling::StandardProblem standard;
  std::int64_t n_general = 0;
  std::int64_t n_standard = 0;
  double ks = 0.0;
  double critical_1pct = 0.0;  // asymptotic two-sample KS critical value
  double ks_max = 0.0;
  std::int64_t bound_violations = 0;  // both sides, tau > t*
  bool passed = false;

  std::string to_json(int indent = 2) const;
};

ScalingCheck verify_scaling(const ExperimentConfig& config,
                            double ks_max = 0.04);

// Covariance oracle table for every eigenmode at the given times (default:
// ten equally spaced times up to t*). Columns: t, mode, lambda, phi, var_y,
// var_z, cov_yz, dist_sq, with Y the constant-rate mode at curvature u_curv.
std::string oracle_table_csv(const ExperimentConfig& config,
                             std::vector<double> times = {});

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double x);

}  // namespace chainbreak

#endif  // CHAINBREAK_EXPERIMENT_HPP_
