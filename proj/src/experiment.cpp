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

#include "chainbreak/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>

#include "chainbreak/config.hpp"
#include "chainbreak/error.hpp"
#include "chainbreak/oracle.hpp"
#include "chainbreak/spectral.hpp"
#include "chainbreak/stats.hpp"
#include "json.hpp"

namespace chainbreak {

namespace {

using config::Value;
using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void assign(ExperimentConfig& c, const std::string& key, const Value& v) {
  using namespace config;
  if (key == "d") {
    const auto d = as_int(v, key);
    if (d < 2 || d > 100000) throw ConfigError("d must be in [2, 100000]");
    c.chain.d = static_cast<int>(d);
  } else if (key == "eps") {
    c.chain.eps = as_double(v, key);
  } else if (key == "sigma") {
    c.chain.sigma = as_double(v, key);
  } else if (key == "b_break") {
    c.chain.b_break = as_double(v, key);
  } else if (key == "potential") {
    c.potential = as_string(v, key);
  } else if (key == "system") {
    c.system = parse_system(as_string(v, key));
  } else if (key == "u_curv") {
    c.u_curv = as_double(v, key);
  } else if (key == "grid") {
    const std::string g = as_string(v, key);
    if (g != "auto") throw ConfigError("grid must be \"auto\"");
    c.coarse_dt.reset();
    c.fine_dt.reset();
    c.window_W.reset();
  } else if (key == "coarse_dt") {
    c.coarse_dt = as_double(v, key);
  } else if (key == "fine_dt") {
    c.fine_dt = as_double(v, key);
  } else if (key == "window_W") {
    c.window_W = as_double(v, key);
  } else if (key == "fine_refine") {
    c.fine_refine = as_double(v, key);
  } else if (key == "horizon") {
    c.horizon = as_double(v, key);
  } else if (key == "n_paths") {
    c.n_paths = as_int(v, key);
  } else if (key == "master_seed") {
    const auto s = as_int(v, key);
    if (s < 0) throw ConfigError("master_seed must be nonnegative");
    c.master_seed = static_cast<std::uint64_t>(s);
  } else if (key == "workers") {
    const auto w = as_int(v, key);
    if (w < 1 || w > 1024) throw ConfigError("workers must be in [1, 1024]");
    c.workers = static_cast<int>(w);
  } else if (key == "track_all_links") {
    c.track_all_links = as_bool(v, key);
  } else if (key == "r_candidates") {
    c.r_candidates = as_doubles(v, key);
  } else if (key == "ks_max") {
    c.thresholds.ks_max = as_double(v, key);
  } else if (key == "link_ks_max") {
    c.thresholds.link_ks_max = as_double(v, key);
  } else if (key == "position_tol") {
    c.thresholds.position_tol = as_double(v, key);
  } else if (key == "s_star_level") {
    c.thresholds.s_star_level = as_double(v, key);
  } else if (key == "s_star_prob_max") {
    c.thresholds.s_star_prob_max = as_double(v, key);
  } else if (key == "csv_out") {
    c.csv_out = as_string(v, key);
  } else if (key == "json_out") {
    c.json_out = as_string(v, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string classify(double ratio, double value) {
  if (!(ratio > 1.0) || !(value < 1.0)) return "outside";
  return value < 0.1 ? "comfortable" : "marginal";
}

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return kNaN;
    if (s == "inf") return kInfiniteHorizon;
    if (s == "-inf") return -kInfiniteHorizon;
  }
  throw ConfigError("expected a number in report JSON");
}

json opt(const std::optional<double>& x) {
  return x ? num(*x) : json(nullptr);
}

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_num(j.at(key));
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(x));
  return buf;
}

template <typename T>
std::uint64_t mix(std::uint64_t h, const T& value) {
  return stats::fnv1a(
      std::span(reinterpret_cast<const unsigned char*>(&value), sizeof value),
      h);
}

std::string suffixed(const std::string& path, const std::string& tag) {
  if (path.empty()) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

// Outcome of one path before aggregation.
struct PathOutcome {
  BreakEvent event;
  double s_star = kNaN;
  double m_star = kNaN;
  bool escaped = false;
  std::string escape_message;
};

}  // namespace

std::string_view system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::kNonlinear: return "nonlinear";
    case SystemKind::kLinearConstant: return "linear-constant";
    case SystemKind::kLinearTimeVarying: return "linear-timevarying";
    case SystemKind::kCoupled: return "coupled";
  }
  return "unknown";
}

SystemKind parse_system(std::string_view name) {
  for (auto k : {SystemKind::kNonlinear, SystemKind::kLinearConstant,
                 SystemKind::kLinearTimeVarying, SystemKind::kCoupled})
    if (system_name(k) == name) return k;
  throw ConfigError("unknown system '" + std::string(name) +
                    "' (nonlinear, linear-constant, linear-timevarying, "
                    "coupled)");
}

void ExperimentConfig::validate() const {
  try {
    chain.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (u_curv && !(*u_curv > 0.0)) throw ConfigError("u_curv must be positive");
  if (chain.eps == 0.0 && !std::isfinite(horizon))
    throw ConfigError("a finite horizon is required when eps = 0");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(fine_refine >= 1.0) || !std::isfinite(fine_refine))
    throw ConfigError("fine_refine must be at least 1");
  if (r_candidates.empty()) throw ConfigError("r_candidates is empty");
  for (double r : r_candidates)
    if (!(r > 0.0)) throw ConfigError("r_candidates must be positive");
  for (const auto* dt : {&coarse_dt, &fine_dt, &window_W})
    if (*dt && !(**dt >= 0.0))
      throw ConfigError("grid entries must be nonnegative");
  if (!(thresholds.s_star_level > 0.0))
    throw ConfigError("s_star_level must be positive");
  try {
    (void)parse_potential(potential);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::string_view toml_text) {
  ExperimentConfig c;
  for (const auto& [key, value] : config::parse_flat_toml(toml_text))
    assign(c, key, value);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void set_key(ExperimentConfig& c, const std::string& key,
             std::string_view value) {
  assign(c, key, config::parse_value(value, /*allow_bare_string=*/true));
}

void apply_override(ExperimentConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override must look like key=value: " +
                      std::string(assignment));
  std::string key(assignment.substr(0, eq));
  while (!key.empty() && key.back() == ' ') key.pop_back();
  set_key(c, key, assignment.substr(eq + 1));
}

Potential resolve_potential(const ExperimentConfig& c) {
  return validated(parse_potential(c.potential), c.chain.b_break,
                   c.r_candidates);
}

engine::SimGrid resolve_grid(const ExperimentConfig& c,
                             const PotentialBounds& bounds) {
  engine::SimGrid grid = engine::auto_grid(c.chain, bounds, c.horizon);
  if (c.coarse_dt) grid.coarse_dt = *c.coarse_dt;
  if (c.fine_dt) {
    grid.fine_dt = *c.fine_dt;
  } else {
    grid.fine_dt = grid.coarse_dt / 20.0 / c.fine_refine;
  }
  if (c.window_W) grid.window_W = *c.window_W;
  engine::validate_grid(grid, c.chain);
  return grid;
}

RegimeReport check_regime(const ChainParams& params) {
  if (!(params.eps > 0.0) || params.eps >= 1.0)
    throw DomainError("check_regime needs 0 < eps < 1");
  if (!(params.sigma > 0.0))
    throw ParameterError("check_regime needs sigma > 0");
  const double l = std::abs(std::log(params.eps));
  const double s2 = params.sigma * params.sigma;
  RegimeReport r;
  r.ratio = params.sigma / params.eps;
  r.vanish3 = s2 * l * l * l;
  r.vanish15 = s2 * std::pow(l, 1.5);
  r.vanish1 = s2 * l;
  r.nonlinear = classify(r.ratio, r.vanish3);
  r.linear_timevarying = classify(r.ratio, r.vanish15);
  r.linear_constant = classify(r.ratio, r.vanish1);
  return r;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const ChainParams& chain = config.chain;
  const Potential pot = resolve_potential(config);
  const bool constant = config.system == SystemKind::kLinearConstant;
  const double u = constant && config.u_curv ? *config.u_curv
                                             : pot.u2(chain.b_break);
  if (!(u > 0.0)) throw ConfigError("curvature U''(b) must be positive");

  PotentialBounds bounds = pot.checked_bounds();
  if (constant && config.u_curv) bounds = {u, u, 0.0, bounds.margin_r};
  const engine::SimGrid grid = resolve_grid(config, bounds);

  engine::SimOptions options;
  options.track_all_links =
      config.track_all_links && config.system != SystemKind::kCoupled;

  std::unique_ptr<engine::LinearPlan> plan;
  if (constant) {
    plan = std::make_unique<engine::LinearPlan>(
        engine::LinearPlan::constant(chain, u, grid, options));
  } else if (config.system == SystemKind::kLinearTimeVarying) {
    plan = std::make_unique<engine::LinearPlan>(
        engine::LinearPlan::time_varying(chain, pot, grid, options));
  }

  const auto n = static_cast<std::size_t>(config.n_paths);
  std::vector<PathOutcome> outcomes(n);
  stats::parallel_for(n, config.workers, [&](std::size_t i) {
    stats::RandomStream rng = stats::seed_stream(config.master_seed, i);
    PathOutcome& out = outcomes[i];
    try {
      switch (config.system) {
        case SystemKind::kNonlinear:
          out.event = engine::simulate_nonlinear(chain, pot, grid, rng, options);
          break;
        case SystemKind::kLinearConstant:
        case SystemKind::kLinearTimeVarying:
          out.event = engine::simulate_linear(*plan, rng, options);
          break;
        case SystemKind::kCoupled: {
          const auto res =
              engine::simulate_coupled(chain, pot, grid, rng, options);
          out.event = res.break_x;
          out.s_star = res.s_star;
          out.m_star = res.m_star;
          break;
        }
      }
    } catch (const DomainEscape& e) {
      out.escaped = true;
      out.escape_message = e.what();
    }
  });

  ExperimentReport report;
  ReportSummary& s = report.summary;
  const double ts = t_star(chain);
  const auto law = limit_law_params(chain.d, u);
  const bool normalizable = chain.eps > 0.0 && chain.sigma > chain.eps;

  s.system = std::string(system_name(config.system));
  s.d = chain.d;
  s.eps = chain.eps;
  s.sigma = chain.sigma;
  s.b_break = chain.b_break;
  s.u_curv = u;
  s.t_star = ts;
  s.gumbel_a = law.min_a();
  s.gumbel_b = law.b_gumbel;
  s.n_paths = config.n_paths;
  if (chain.eps > 0.0 && chain.eps < 1.0 && chain.sigma > 0.0)
    s.regime = check_regime(chain);

  const std::size_t d = static_cast<std::size_t>(chain.d);
  std::vector<double> normalized;
  std::vector<std::vector<double>> link_norm(d);
  s.position_counts.assign(d, 0);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  report.rows.reserve(n);
  report.link_times.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const PathOutcome& o = outcomes[i];
    PathRow row;
    row.path_index = static_cast<std::int64_t>(i);
    row.normalized_tau = kNaN;
    if (o.escaped) {
      ++s.n_escaped;
      row.tau = kNaN;
      row.censored = true;
      report.escapes.push_back("path " + std::to_string(i) + ": " +
                               o.escape_message);
    } else {
      row.tau = o.event.tau;
      row.link = o.event.link;
      row.censored = o.event.censored;
      if (row.censored) {
        ++s.n_censored;
      } else {
        ++s.n_uncensored;
        if (row.tau > ts) ++s.bound_violations;
        ++s.position_counts[static_cast<std::size_t>(row.link - 1)];
        if (normalizable) {
          row.normalized_tau = normalize_break_time(row.tau, chain, u);
          normalized.push_back(row.normalized_tau);
        }
      }
    }
    std::vector<double> lt = o.event.link_times;
    if (lt.size() != d) lt.assign(d, kNaN);
    if (normalizable)
      for (std::size_t l = 0; l < d; ++l)
        if (std::isfinite(lt[l]))
          link_norm[l].push_back(normalize_break_time(lt[l], chain, u));

    h = mix(h, row.path_index);
    h = mix(h, row.tau);
    h = mix(h, row.link);
    h = mix(h, static_cast<unsigned char>(row.censored));
    for (double t : lt) h = mix(h, t);
    if (config.system == SystemKind::kCoupled) {
      h = mix(h, o.s_star);
      report.s_star.push_back(o.s_star);
    }
    report.rows.push_back(row);
    report.link_times.push_back(std::move(lt));
  }
  s.digest = hex64(h);

  if (s.n_escaped * 100 > s.n_paths) {
    throw Error(ErrorCode::kDomainEscape,
              std::to_string(s.n_escaped) + " of " +
                  std::to_string(s.n_paths) +
                  " paths left the validated domain (limit 1%); first: " +
                  report.escapes.front());
  }

  if (!normalized.empty()) {
    stats::Sample sample(normalized);
    sample.sort();
    const double a0 = law.min_a(), b = law.b_gumbel;
    s.ks = stats::ks_distance(
        sample, [&](double r) { return gumbel_cdf(r, a0, b); });
    s.mean_normalized_tau = stats::mean(normalized);
    const auto vals = sample.values();
    const double lo = vals.front(), hi = vals.back();
    constexpr int kEcdfPoints = 64;
    for (int k = 0; k < kEcdfPoints; ++k) {
      const double r =
          hi > lo ? lo + (hi - lo) * k / (kEcdfPoints - 1.0) : lo;
      const auto count = std::upper_bound(vals.begin(), vals.end(), r) -
                         vals.begin();
      s.ecdf.push_back({r, static_cast<double>(count) / vals.size(),
                        gumbel_cdf(r, a0, b)});
    }
  }
  for (std::size_t l = 0; l < d; ++l) {
    s.link_ks_samples.push_back(static_cast<double>(link_norm[l].size()));
    if (link_norm[l].empty()) {
      s.link_ks.push_back(std::nullopt);
      continue;
    }
    const double a = law.link_a(static_cast<int>(l + 1)), b = law.b_gumbel;
    s.link_ks.push_back(stats::ks_distance(
        stats::Sample(std::move(link_norm[l])),
        [&](double r) { return gumbel_cdf(r, a, b); }));
  }

  s.position_probs = position_limit_probs(chain.d);
  if (s.n_uncensored > 0) {
    for (auto c : s.position_counts)
      s.position_freq.push_back(static_cast<double>(c) / s.n_uncensored);
    s.position_chisq = stats::position_chisq(s.position_counts, s.position_probs);
  }

  if (!report.s_star.empty()) {
    std::vector<double> finite;
    std::vector<double> m;
    for (std::size_t i = 0; i < n; ++i) {
      if (outcomes[i].escaped) continue;
      finite.push_back(outcomes[i].s_star);
      m.push_back(outcomes[i].m_star);
    }
    if (!finite.empty()) {
      s.s_star_mean = stats::mean(finite);
      s.s_star_max = *std::max_element(finite.begin(), finite.end());
      s.s_star_exceed_prob =
          static_cast<double>(std::count_if(
              finite.begin(), finite.end(),
              [&](double v) { return v >= config.thresholds.s_star_level; })) /
          finite.size();
      s.m_star_mean = stats::mean(m);
    }
  }

  // Verdict.
  auto fail = [&](std::string msg) {
    s.passed = false;
    s.failures.push_back(std::move(msg));
  };
  if (s.bound_violations > 0)
    fail(std::to_string(s.bound_violations) + " break times exceed t*");
  if (chain.eps > 0.0 && s.n_censored > 0)
    fail(std::to_string(s.n_censored) +
         " censored paths although eps > 0 (engine bug)");
  const Thresholds& th = config.thresholds;
  if (th.ks_max) {
    if (!s.ks)
      fail("KS distance unavailable");
    else if (*s.ks > *th.ks_max)
      fail("KS distance " + format_double(*s.ks) + " > " +
           format_double(*th.ks_max));
  }
  if (th.link_ks_max) {
    for (std::size_t l = 0; l < d; ++l) {
      const auto& k = s.link_ks[l];
      if (!k)
        fail("link " + std::to_string(l + 1) + " KS unavailable");
      else if (*k > *th.link_ks_max)
        fail("link " + std::to_string(l + 1) + " KS " + format_double(*k) +
             " > " + format_double(*th.link_ks_max));
    }
  }
  if (th.position_tol) {
    if (s.position_freq.empty()) {
      fail("no uncensored paths for position frequencies");
    } else {
      for (std::size_t l = 0; l < d; ++l) {
        const double dev = std::abs(s.position_freq[l] - s.position_probs[l]);
        if (dev > *th.position_tol)
          fail("link " + std::to_string(l + 1) + " frequency " +
               format_double(s.position_freq[l]) + " deviates from " +
               format_double(s.position_probs[l]) + " by more than " +
               format_double(*th.position_tol));
      }
    }
  }
  if (th.s_star_prob_max) {
    if (!s.s_star_exceed_prob)
      fail("S* statistics unavailable (coupled system required)");
    else if (*s.s_star_exceed_prob > *th.s_star_prob_max)
      fail("P(S* >= " + format_double(th.s_star_level) + ") = " +
           format_double(*s.s_star_exceed_prob) + " > " +
           format_double(*th.s_star_prob_max));
  }
  return report;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "eps") return SweepAxis::kEps;
  if (name == "sigma") return SweepAxis::kSigma;
  if (name == "d") return SweepAxis::kD;
  if (name == "b_break") return SweepAxis::kBBreak;
  if (name == "n_paths") return SweepAxis::kNPaths;
  throw ParameterError("unknown sweep axis '" + std::string(name) +
                       "' (eps, sigma, d, b_break, n_paths)");
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& base,
                                    SweepAxis axis,
                                    const std::vector<double>& values) {
  static constexpr const char* kNames[] = {"eps", "sigma", "d", "b_break",
                                           "n_paths"};
  const char* name = kNames[static_cast<int>(axis)];
  std::vector<ExperimentReport> reports;
  for (double v : values) {
    ExperimentConfig c = base;
    const bool integral = axis == SweepAxis::kD || axis == SweepAxis::kNPaths;
    if (integral && std::nearbyint(v) != v)
      throw ParameterError(std::string(name) + " values must be integers");
    switch (axis) {
      case SweepAxis::kEps: c.chain.eps = v; break;
      case SweepAxis::kSigma: c.chain.sigma = v; break;
      case SweepAxis::kD: c.chain.d = static_cast<int>(v); break;
      case SweepAxis::kBBreak: c.chain.b_break = v; break;
      case SweepAxis::kNPaths: c.n_paths = static_cast<std::int64_t>(v); break;
    }
    const std::string tag = std::string("_") + name + "_" + format_double(v);
    c.csv_out = suffixed(c.csv_out, tag);
    c.json_out = suffixed(c.json_out, tag);
    reports.push_back(run_experiment(c));
    write_outputs(c, reports.back());
  }
  return reports;
}

ExperimentConfig law_recipe(std::string_view name) {
  ExperimentConfig c;
  c.chain = {3, 1e-3, 0.05, 2.0};
  if (name == "scaling") {
    c.chain = {3, 0.02, 0.2, 3.0};
    c.potential = "quadratic:u=4";
    c.n_paths = 5000;
    c.track_all_links = false;
    return c;
  }
  c.system = parse_system(name);
  switch (c.system) {
    case SystemKind::kLinearConstant:
      c.potential = "quadratic:u=1";
      c.n_paths = 2000;
      c.fine_refine = 16.0;
      break;
    case SystemKind::kNonlinear:
    case SystemKind::kLinearTimeVarying:
      c.potential = "cosh";
      c.n_paths = 500;
      c.fine_refine = 8.0;
      c.track_all_links = false;
      break;
    case SystemKind::kCoupled:
      c.potential = "cosh";
      c.n_paths = 200;
      c.track_all_links = false;
      break;
  }
  return with_law_thresholds(c);
}

ExperimentConfig with_law_thresholds(ExperimentConfig c) {
  Thresholds& th = c.thresholds;
  switch (c.system) {
    case SystemKind::kLinearConstant:
      if (!th.ks_max) th.ks_max = 0.15;
      if (!th.link_ks_max && c.track_all_links) th.link_ks_max = 0.2;
      if (!th.position_tol) th.position_tol = 0.05;
      break;
    case SystemKind::kNonlinear:
    case SystemKind::kLinearTimeVarying:
      if (!th.ks_max) th.ks_max = 0.2;
      if (!th.position_tol) th.position_tol = 0.07;
      break;
    case SystemKind::kCoupled:
      if (!th.s_star_prob_max) th.s_star_prob_max = 0.05;
      break;
  }
  return c;
}

ScalingCheck verify_scaling(const ExperimentConfig& config, double ks_max) {
  config.validate();
  const Potential pot = resolve_potential(config);
  ScalingCheck check;
  check.u_curv = config.u_curv ? *config.u_curv : pot.u2(config.chain.b_break);
  check.b_break = config.chain.b_break;
  check.ks_max = ks_max;
  check.standard = scaling::reduce_to_standard(
      check.u_curv, check.b_break, config.chain.eps, config.chain.sigma);

  ExperimentConfig general = config;
  general.system = SystemKind::kLinearConstant;
  general.u_curv = check.u_curv;
  general.track_all_links = false;
  general.thresholds = {};
  general.csv_out.clear();
  general.json_out.clear();
  const PotentialBounds gb{check.u_curv, check.u_curv, 0.0,
                           pot.checked_bounds().margin_r};
  const engine::SimGrid grid = resolve_grid(general, gb);
  general.coarse_dt = grid.coarse_dt;
  general.fine_dt = grid.fine_dt;
  general.window_W = grid.window_W;

  // Time runs 1/u times faster in the standard problem.
  ExperimentConfig standard = general;
  standard.chain.eps = check.standard.eps_std;
  standard.chain.sigma = check.standard.sigma_std;
  standard.chain.b_break = 2.0;
  standard.u_curv = 1.0;
  standard.potential = "quadratic:u=1";
  standard.coarse_dt = grid.coarse_dt * check.u_curv;
  standard.fine_dt = grid.fine_dt * check.u_curv;
  standard.window_W = grid.window_W * check.u_curv;
  standard.master_seed = stats::splitmix64(config.master_seed ^ 0x5ca1ab1eULL);

  const auto rg = run_experiment(general);
  const auto rs = run_experiment(standard);
  std::vector<double> tg, ts;
  for (const auto& r : rg.rows)
    if (!r.censored) tg.push_back(r.tau);
  for (const auto& r : rs.rows)
    if (!r.censored) ts.push_back(r.tau * check.standard.time_factor);
  check.bound_violations =
      rg.summary.bound_violations + rs.summary.bound_violations;
  check.n_general = static_cast<std::int64_t>(tg.size());
  check.n_standard = static_cast<std::int64_t>(ts.size());
  if (tg.empty() || ts.empty())
    throw RegimeError("no uncensored break times to compare");
  check.ks = stats::ks_two_sample(stats::Sample(std::move(tg)),
                                  stats::Sample(std::move(ts)));
  check.critical_1pct = stats::ks_two_sample_critical(
      static_cast<std::size_t>(check.n_general),
      static_cast<std::size_t>(check.n_standard), 0.01);
  check.passed = check.ks <= ks_max;
  return check;
}

std::string ScalingCheck::to_json(int indent) const {
  json j;
  j["u_curv"] = num(u_curv);
  j["b_break"] = num(b_break);
  j["eps_std"] = num(standard.eps_std);
  j["sigma_std"] = num(standard.sigma_std);
  j["time_factor"] = num(standard.time_factor);
  j["n_general"] = n_general;
  j["n_standard"] = n_standard;
  j["ks"] = num(ks);
  j["critical_1pct"] = num(critical_1pct);
  j["ks_max"] = num(ks_max);
  j["bound_violations"] = bound_violations;
  j["passed"] = passed;
  return j.dump(indent);
}

std::string oracle_table_csv(const ExperimentConfig& config,
                             std::vector<double> times) {
  config.validate();
  const ChainParams& chain = config.chain;
  if (!(chain.eps > 0.0))
    throw ConfigError("the oracle table needs eps > 0");
  const Potential pot = resolve_potential(config);
  const double u = config.u_curv ? *config.u_curv : pot.u2(chain.b_break);
  const double ts = t_star(chain);
  if (times.empty())
    for (int k = 1; k <= 10; ++k) times.push_back(ts * k / 10.0);
  const Spectrum spec = eigendecompose(chain.d);
  std::string out = "t,mode,lambda,phi,var_y,var_z,cov_yz,dist_sq\n";
  for (double t : times) {
    const double phi = stiffness_at(pot, chain, t);
    for (std::size_t j = 0; j < spec.lambdas.size(); ++j) {
      const double lambda = spec.lambdas[j];
      const double s = -lambda;
      const double vy = oracle::ou_variance(s * u, chain.sigma, t);
      const double vz = oracle::z_variance(pot, chain, t, s);
      const double c = oracle::yz_covariance(pot, chain, u, t, s);
      for (double v : {t, static_cast<double>(j + 1), lambda, phi, vy, vz, c})
        out += format_double(v) + ',';
      out += format_double(vy + vz - 2.0 * c) + '\n';
    }
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string rows_csv(const ExperimentReport& report) {
  std::string out = "path_index,tau,link,censored,normalized_tau\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.path_index);
    out += ',';
    out += format_double(r.tau);
    out += ',';
    out += std::to_string(r.link);
    out += r.censored ? ",1," : ",0,";
    out += format_double(r.normalized_tau);
    out += '\n';
  }
  return out;
}

std::string summary_json(const ReportSummary& s, int indent) {
  json j;
  j["system"] = s.system;
  j["d"] = s.d;
  j["eps"] = num(s.eps);
  j["sigma"] = num(s.sigma);
  j["b_break"] = num(s.b_break);
  j["u_curv"] = num(s.u_curv);
  j["t_star"] = num(s.t_star);
  j["gumbel_a"] = num(s.gumbel_a);
  j["gumbel_b"] = num(s.gumbel_b);
  j["n_paths"] = s.n_paths;
  j["n_uncensored"] = s.n_uncensored;
  j["n_censored"] = s.n_censored;
  j["n_escaped"] = s.n_escaped;
  j["bound_violations"] = s.bound_violations;
  j["ks"] = opt(s.ks);
  j["link_ks"] = json::array();
  for (const auto& k : s.link_ks) j["link_ks"].push_back(opt(k));
  j["link_ks_samples"] = s.link_ks_samples;
  j["position_counts"] = s.position_counts;
  j["position_freq"] = s.position_freq;
  j["position_probs"] = s.position_probs;
  j["position_chisq"] = opt(s.position_chisq);
  j["mean_normalized_tau"] = opt(s.mean_normalized_tau);
  if (s.regime) {
    const auto& r = *s.regime;
    j["regime"] = {{"ratio", num(r.ratio)},
                   {"vanish3", num(r.vanish3)},
                   {"vanish15", num(r.vanish15)},
                   {"vanish1", num(r.vanish1)},
                   {"nonlinear", r.nonlinear},
                   {"linear_timevarying", r.linear_timevarying},
                   {"linear_constant", r.linear_constant}};
  } else {
    j["regime"] = nullptr;
  }
  j["ecdf"] = json::array();
  for (const auto& p : s.ecdf)
    j["ecdf"].push_back({num(p.r), num(p.empirical), num(p.gumbel)});
  j["s_star_mean"] = opt(s.s_star_mean);
  j["s_star_max"] = opt(s.s_star_max);
  j["s_star_exceed_prob"] = opt(s.s_star_exceed_prob);
  j["m_star_mean"] = opt(s.m_star_mean);
  j["digest"] = s.digest;
  j["passed"] = s.passed;
  j["failures"] = s.failures;
  return j.dump(indent);
}

ReportSummary parse_summary_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid report JSON: ") + e.what());
  }
  try {
    ReportSummary s;
    s.system = j.at("system").get<std::string>();
    s.d = j.at("d").get<int>();
    s.eps = get_num(j.at("eps"));
    s.sigma = get_num(j.at("sigma"));
    s.b_break = get_num(j.at("b_break"));
    s.u_curv = get_num(j.at("u_curv"));
    s.t_star = get_num(j.at("t_star"));
    s.gumbel_a = get_num(j.at("gumbel_a"));
    s.gumbel_b = get_num(j.at("gumbel_b"));
    s.n_paths = j.at("n_paths").get<std::int64_t>();
    s.n_uncensored = j.at("n_uncensored").get<std::int64_t>();
    s.n_censored = j.at("n_censored").get<std::int64_t>();
    s.n_escaped = j.at("n_escaped").get<std::int64_t>();
    s.bound_violations = j.at("bound_violations").get<std::int64_t>();
    s.ks = get_opt(j, "ks");
    for (const auto& k : j.at("link_ks"))
      s.link_ks.push_back(k.is_null() ? std::nullopt
                                      : std::optional<double>(get_num(k)));
    s.link_ks_samples = j.at("link_ks_samples").get<std::vector<double>>();
    s.position_counts =
        j.at("position_counts").get<std::vector<std::int64_t>>();
    s.position_freq = j.at("position_freq").get<std::vector<double>>();
    s.position_probs = j.at("position_probs").get<std::vector<double>>();
    s.position_chisq = get_opt(j, "position_chisq");
    s.mean_normalized_tau = get_opt(j, "mean_normalized_tau");
    if (const auto& r = j.at("regime"); !r.is_null()) {
      s.regime = RegimeReport{get_num(r.at("ratio")),
                              get_num(r.at("vanish3")),
                              get_num(r.at("vanish15")),
                              get_num(r.at("vanish1")),
                              r.at("nonlinear").get<std::string>(),
                              r.at("linear_timevarying").get<std::string>(),
                              r.at("linear_constant").get<std::string>()};
    }
    for (const auto& p : j.at("ecdf"))
      s.ecdf.push_back({get_num(p.at(0)), get_num(p.at(1)), get_num(p.at(2))});
    s.s_star_mean = get_opt(j, "s_star_mean");
    s.s_star_max = get_opt(j, "s_star_max");
    s.s_star_exceed_prob = get_opt(j, "s_star_exceed_prob");
    s.m_star_mean = get_opt(j, "m_star_mean");
    s.digest = j.at("digest").get<std::string>();
    s.passed = j.at("passed").get<bool>();
    s.failures = j.at("failures").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

void write_outputs(const ExperimentConfig& config,
                   const ExperimentReport& report) {
  if (!config.csv_out.empty()) write_text_file(config.csv_out, rows_csv(report));
  if (!config.json_out.empty())
    write_text_file(config.json_out, summary_json(report.summary) + "\n");
}

}  // namespace chainbreak
