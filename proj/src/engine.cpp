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

#include "chainbreak/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

#include "chainbreak/error.hpp"
#include "quadrature.hpp"

namespace chainbreak::engine {

double default_window(const ChainParams& params) {
  const double ts = t_star(params);
  if (!std::isfinite(ts)) return 0.0;
  if (params.sigma > params.eps) {
    const double gamma =
        std::sqrt(static_cast<double>(params.d) * (params.d - 1.0));
    const double ratio = params.sigma / params.eps;
    return std::min(ts, 3.0 * gamma * ratio * std::sqrt(std::log(ratio)));
  }
  // Outside the noise-dominated regime the break sits within a few
  // relaxation times of t*; refine the last 5% of the run.
  return 0.05 * ts;
}

SimGrid auto_grid(const ChainParams& params, const PotentialBounds& bounds,
                  double horizon) {
  params.validate();
  SimGrid grid;
  grid.coarse_dt = std::min(0.5, 0.1 / bounds.kappa_max);
  grid.fine_dt = grid.coarse_dt / 20.0;
  grid.window_W = default_window(params);
  grid.horizon = horizon;
  return grid;
}

void validate_grid(const SimGrid& grid, const ChainParams& params) {
  if (!(grid.coarse_dt > 0.0) || !(grid.fine_dt > 0.0))
    throw ParameterError("grid steps must be positive");
  if (grid.fine_dt > grid.coarse_dt)
    throw ParameterError("fine_dt must not exceed coarse_dt");
  if (!(grid.window_W >= 0.0)) throw ParameterError("window_W must be >= 0");
  const double ts = t_star(params);
  if (std::isfinite(ts)) {
    if (grid.window_W > ts * (1.0 + 1e-12))
      throw ParameterError("window_W must not exceed t*");
  } else if (!(grid.horizon > 0.0) || !std::isfinite(grid.horizon)) {
    throw ParameterError("a finite positive horizon is required when eps = 0");
  }
}

namespace {

void append_segment(std::vector<double>& times, double from, double to,
                    double step) {
  if (!(to > from)) return;
  const auto n = static_cast<long>(std::ceil((to - from) / step - 1e-9));
  const long steps = std::max(1L, n);
  for (long k = 1; k < steps; ++k)
    times.push_back(from + (to - from) * static_cast<double>(k) /
                               static_cast<double>(steps));
  times.push_back(to);
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

}  // namespace

Schedule make_schedule(const ChainParams& params, const SimGrid& grid,
                       const SimOptions& options) {
  params.validate();
  validate_grid(grid, params);
  Schedule s;
  s.t_star = t_star(params);
  const bool finite = std::isfinite(s.t_star);
  const double target = finite ? s.t_star : grid.horizon;
  double end = target;
  if (finite && options.track_all_links)
    end = target + std::max(grid.window_W, 100.0 * grid.fine_dt);
  if (options.stop_time < end) end = options.stop_time;
  if (!(end > 0.0)) throw ParameterError("simulation end must be > 0");
  s.end = end;

  std::vector<double> times{0.0};
  const double window_start = finite ? std::max(0.0, target - grid.window_W)
                                     : target;
  append_segment(times, 0.0, std::min(window_start, end), grid.coarse_dt);
  if (end > window_start)
    append_segment(times, window_start, std::min(target, end), grid.fine_dt);
  if (end > target) append_segment(times, target, end, grid.fine_dt);

  if (!options.checkpoints.empty()) {
    std::vector<double> cps;
    for (double c : options.checkpoints)
      if (c > 0.0 && c <= end) cps.push_back(c);
    std::sort(cps.begin(), cps.end());
    std::vector<double> merged;
    merged.reserve(times.size() + cps.size());
    std::size_t i = 0, j = 0;
    while (i < times.size() || j < cps.size()) {
      const bool take_cp =
          j < cps.size() && (i >= times.size() || cps[j] <= times[i]);
      const double v = take_cp ? cps[j++] : times[i++];
      if (!merged.empty() && nearly_equal(merged.back(), v)) {
        // Checkpoints and the run end win over ordinary grid points.
        if (take_cp || v == end) merged.back() = v;
        continue;
      }
      merged.push_back(v);
    }
    times = std::move(merged);
  }
  s.times = std::move(times);
  return s;
}

std::optional<Crossing> first_break(std::span<const double> gap_prev,
                                    std::span<const double> gap_next,
                                    double t_prev, double t_next,
                                    double b_break, double t_star) {
  if (gap_prev.size() != gap_next.size())
    throw ParameterError("gap vectors differ in length");
  std::optional<Crossing> best;
  for (std::size_t i = 0; i < gap_next.size(); ++i) {
    const double gp = gap_prev[i], gn = gap_next[i];
    if (!(gn >= b_break)) continue;
    double tau = t_next;
    if (gp < b_break) {
      const double frac = (b_break - gp) / (gn - gp);
      tau = t_prev + frac * (t_next - t_prev);
    } else {
      tau = t_prev;
    }
    if (!best || tau < best->tau)
      best = Crossing{tau, static_cast<int>(i) + 1};
  }
  if (!best && std::isfinite(t_star) &&
      t_next >= t_star * (1.0 - 1e-15) && !gap_next.empty()) {
    // The gaps sum to d*b at t*, so the largest one sits at b up to rounding.
    const auto it = std::max_element(gap_next.begin(), gap_next.end());
    if (*it >= b_break * (1.0 - 1e-12))
      best = Crossing{t_star, static_cast<int>(it - gap_next.begin()) + 1};
  }
  if (best && best->tau > t_star) best->tau = t_star;
  return best;
}

void gaps_of(std::span<const double> positions, std::span<double> gaps) {
  for (std::size_t i = 0; i + 1 < positions.size(); ++i)
    gaps[i] = positions[i + 1] - positions[i];
}

void nonlinear_euler_step(const Potential& p, const ChainParams& params,
                          std::span<double> x, double t_next, double dt,
                          std::span<const double> dw) {
  const int d = params.d;
  double force_left = p.u1(x[1] - x[0]);
  for (int i = 1; i < d; ++i) {
    const double force_right = p.u1(x[i + 1] - x[i]);
    x[i] += (force_right - force_left) * dt + params.sigma * dw[i - 1];
    force_left = force_right;
  }
  x[0] = 0.0;
  x[d] = d + params.eps * t_next;
}

void linearized_euler_step(double phi, const ChainParams& params,
                           std::span<double> x, double t_next, double dt,
                           std::span<const double> dw) {
  const int d = params.d;
  double left_old = x[0];
  for (int i = 1; i < d; ++i) {
    const double cur_old = x[i];
    x[i] = cur_old + phi * (x[i + 1] + left_old - 2.0 * cur_old) * dt +
           params.sigma * dw[i - 1];
    left_old = cur_old;
  }
  x[0] = 0.0;
  x[d] = d + params.eps * t_next;
}

namespace {

class BreakMonitor {
 public:
  BreakMonitor(const ChainParams& params, double t_star, bool track_all)
      : b_(params.b_break),
        t_star_(t_star),
        track_all_(track_all),
        link_times_(static_cast<std::size_t>(params.d),
                    std::numeric_limits<double>::quiet_NaN()) {}

  // Returns true once the run may stop.
  bool update(std::span<const double> gp, std::span<const double> gn,
              double t_prev, double t_next) {
    if (!found_) {
      if (auto c = first_break(gp, gn, t_prev, t_next, b_, t_star_)) {
        found_ = true;
        crossing_ = *c;
      }
    }
    if (!track_all_) return found_;
    bool all = true;
    for (std::size_t i = 0; i < gn.size(); ++i) {
      if (!std::isnan(link_times_[i])) continue;
      if (gn[i] >= b_) {
        link_times_[i] =
            gp[i] < b_
                ? t_prev + (b_ - gp[i]) / (gn[i] - gp[i]) * (t_next - t_prev)
                : t_prev;
      } else {
        all = false;
      }
    }
    if (found_) {
      auto& own = link_times_[static_cast<std::size_t>(crossing_.link - 1)];
      if (std::isnan(own)) own = crossing_.tau;
    }
    return found_ && all;
  }

  bool found() const noexcept { return found_; }

  BreakEvent finish() const {
    BreakEvent ev;
    if (found_) {
      ev.tau = crossing_.tau;
      ev.link = crossing_.link;
      ev.censored = false;
      if (ev.tau > t_star_)
        throw std::logic_error("break time exceeds the deterministic bound t*");
    }
    if (track_all_) ev.link_times = link_times_;
    return ev;
  }

  BreakEvent censored_at(double end) const {
    BreakEvent ev = finish();
    if (!found_) ev.tau = end;
    return ev;
  }

 private:
  double b_;
  double t_star_;
  bool track_all_;
  bool found_ = false;
  Crossing crossing_;
  std::vector<double> link_times_;
};

std::vector<double> initial_positions(int d) {
  std::vector<double> x(static_cast<std::size_t>(d) + 1);
  for (int i = 0; i <= d; ++i) x[static_cast<std::size_t>(i)] = i;
  return x;
}

}  // namespace

BreakEvent simulate_nonlinear(const ChainParams& params, const Potential& p,
                              const SimGrid& grid, stats::RandomStream& rng,
                              const SimOptions& options) {
  const PotentialBounds& bounds = p.checked_bounds();
  const Schedule sched = make_schedule(params, grid, options);
  const int d = params.d;
  const double limit = params.b_break + bounds.margin_r;

  std::vector<double> x = initial_positions(d);
  std::vector<double> gp(static_cast<std::size_t>(d), 1.0), gn(gp.size());
  std::vector<double> dw(static_cast<std::size_t>(d - 1));
  BreakMonitor monitor(params, sched.t_star, options.track_all_links);
  if (options.observer) options.observer(0.0, x);

  const auto& ts = sched.times;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double dt = ts[k + 1] - ts[k];
    const double sq = std::sqrt(dt);
    for (auto& w : dw) w = sq * rng.normal();
    nonlinear_euler_step(p, params, x, ts[k + 1], dt, dw);
    gaps_of(x, gn);
    if (options.observer) options.observer(ts[k + 1], x);
    const bool stop = monitor.update(gp, gn, ts[k], ts[k + 1]);
    if (stop) break;
    for (std::size_t i = 0; i < gn.size(); ++i) {
      if (gn[i] > limit) {
        if (!monitor.found())
          throw DomainEscape(ts[k + 1], static_cast<int>(i) + 1, gn[i]);
        return monitor.finish();
      }
    }
    std::swap(gp, gn);
  }
  return monitor.censored_at(sched.end);
}

LinearPlan::LinearPlan(const ChainParams& params, const SimGrid& grid,
                       const SimOptions& options)
    : params_(params),
      schedule_(make_schedule(params, grid, options)),
      spectrum_(eigendecompose(params.d)) {}

std::size_t LinearPlan::row_of(std::size_t k) const {
  auto it = std::upper_bound(
      runs_.begin(), runs_.end(), k,
      [](std::size_t v, const Run& r) { return v < r.end; });
  if (it == runs_.end()) throw std::out_of_range("step outside the schedule");
  const std::size_t begin = it == runs_.begin() ? 0 : std::prev(it)->end;
  return it->row + (k - begin) * it->stride;
}

LinearPlan LinearPlan::constant(const ChainParams& params, double u_curv,
                                const SimGrid& grid,
                                const SimOptions& options) {
  if (!(u_curv > 0.0)) throw ParameterError("u_curv must be > 0");
  LinearPlan plan(params, grid, options);
  const Eigen::VectorXd q_nu =
      plan.spectrum_.q * pulling_profile(params.d);
  const auto& ts = plan.schedule_.times;
  const std::size_t m = plan.modes();
  // Steps whose lengths agree to rounding share one coefficient row.
  double run_dt = -1.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double dt = ts[k + 1] - ts[k];
    if (!plan.runs_.empty() && std::abs(dt - run_dt) <= 1e-12 * run_dt) {
      plan.runs_.back().end = k + 1;
      continue;
    }
    run_dt = dt;
    plan.runs_.push_back({k + 1, plan.runs_.size(), 0});
    for (std::size_t j = 0; j < m; ++j) {
      const double rate = -plan.spectrum_.lambdas[j] * u_curv;
      plan.decay_.push_back(std::exp(-rate * dt));
      plan.drift_.push_back(-params.eps * q_nu(static_cast<Eigen::Index>(j)) *
                            -std::expm1(-rate * dt) / rate);
      plan.noise_sd_.push_back(
          params.sigma * std::sqrt(-std::expm1(-2.0 * rate * dt) / (2.0 * rate)));
    }
  }
  return plan;
}

LinearPlan LinearPlan::time_varying(const ChainParams& params,
                                    const Potential& p, const SimGrid& grid,
                                    const SimOptions& options) {
  LinearPlan plan(params, grid, options);
  const Eigen::VectorXd q_nu =
      plan.spectrum_.q * pulling_profile(params.d);
  const auto& ts = plan.schedule_.times;
  const std::size_t m = plan.modes();
  const std::size_t steps = ts.size() - 1;
  plan.decay_.resize(steps * m);
  plan.drift_.resize(steps * m);
  plan.noise_sd_.resize(steps * m);
  plan.runs_.push_back({steps, 0, 1});
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = ts[k], t1 = ts[k + 1];
    const double dphi = stiffness_integral(p, params, t0, t1);
    for (std::size_t j = 0; j < m; ++j) {
      const double rate = -plan.spectrum_.lambdas[j];
      const double mean_part = detail::integrate_fixed(
          [&](double s) {
            return std::exp(-rate * stiffness_integral(p, params, s, t1));
          },
          t0, t1);
      const double var_part = detail::integrate_fixed(
          [&](double s) {
            return std::exp(-2.0 * rate * stiffness_integral(p, params, s, t1));
          },
          t0, t1);
      plan.decay_[k * m + j] = std::exp(-rate * dphi);
      plan.drift_[k * m + j] =
          -params.eps * q_nu(static_cast<Eigen::Index>(j)) * mean_part;
      plan.noise_sd_[k * m + j] = params.sigma * std::sqrt(var_part);
    }
  }
  return plan;
}

BreakEvent simulate_linear(const LinearPlan& plan, stats::RandomStream& rng,
                           const SimOptions& options) {
  const ChainParams& params = plan.params();
  const Schedule& sched = plan.schedule();
  const Spectrum& spec = plan.spectrum();
  const int d = params.d;
  const std::size_t m = plan.modes();

  std::vector<double> y(m, 0.0);
  std::vector<double> x = initial_positions(d);
  std::vector<double> gp(static_cast<std::size_t>(d), 1.0), gn(gp.size());
  BreakMonitor monitor(params, sched.t_star, options.track_all_links);
  if (options.observer) options.observer(0.0, x);

  const auto& ts = sched.times;
  std::size_t k = 0;
  for (const auto& run : plan.runs()) {
    for (std::size_t row = run.row; k < run.end; ++k, row += run.stride) {
      const double* decay = plan.row_decay(row);
      const double* drift = plan.row_drift(row);
      const double* sd = plan.row_noise_sd(row);
      for (std::size_t j = 0; j < m; ++j)
        y[j] = decay[j] * y[j] + drift[j] + sd[j] * rng.normal();
      const double t = ts[k + 1];
      const double right = d + params.eps * t;
      x[0] = 0.0;
      for (int i = 1; i < d; ++i) {
        double v = static_cast<double>(i) / d * right;
        for (std::size_t j = 0; j < m; ++j)
          v += spec.q(static_cast<Eigen::Index>(j), i - 1) * y[j];
        x[static_cast<std::size_t>(i)] = v;
      }
      x[static_cast<std::size_t>(d)] = right;
      gaps_of(x, gn);
      if (options.observer) options.observer(t, x);
      if (monitor.update(gp, gn, ts[k], t)) return monitor.censored_at(sched.end);
      std::swap(gp, gn);
    }
  }
  return monitor.censored_at(sched.end);
}

BreakEvent simulate_linear_constant(const ChainParams& params, double u_curv,
                                    const SimGrid& grid,
                                    stats::RandomStream& rng,
                                    const SimOptions& options) {
  return simulate_linear(LinearPlan::constant(params, u_curv, grid, options),
                         rng, options);
}

BreakEvent simulate_linear_timevarying(const ChainParams& params,
                                       const Potential& p, const SimGrid& grid,
                                       stats::RandomStream& rng,
                                       const SimOptions& options) {
  p.checked_bounds();
  return simulate_linear(LinearPlan::time_varying(params, p, grid, options),
                         rng, options);
}

CoupledResult simulate_coupled(const ChainParams& params, const Potential& p,
                               const SimGrid& grid, stats::RandomStream& rng,
                               const SimOptions& options) {
  const PotentialBounds& bounds = p.checked_bounds();
  SimOptions run_options = options;
  run_options.track_all_links = false;
  const Schedule sched = make_schedule(params, grid, run_options);
  const int d = params.d;
  const double limit = params.b_break + bounds.margin_r;

  std::vector<double> x = initial_positions(d), z = x;
  const std::size_t nd = static_cast<std::size_t>(d);
  std::vector<double> gxp(nd, 1.0), gxn(nd), gzp(nd, 1.0), gzn(nd);
  std::vector<double> dw(nd - 1);
  BreakMonitor mon_x(params, sched.t_star, false);
  BreakMonitor mon_z(params, sched.t_star, false);
  CoupledResult result;
  if (options.observer) options.observer(0.0, x);

  const auto& ts = sched.times;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double dt = ts[k + 1] - ts[k];
    const double sq = std::sqrt(dt);
    for (auto& w : dw) w = sq * rng.normal();
    const double phi = stiffness_at(p, params, ts[k]);
    nonlinear_euler_step(p, params, x, ts[k + 1], dt, dw);
    linearized_euler_step(phi, params, z, ts[k + 1], dt, dw);
    gaps_of(x, gxn);
    gaps_of(z, gzn);
    if (options.observer) options.observer(ts[k + 1], x);

    double dist = 0.0;
    for (int i = 1; i < d; ++i) {
      const double diff = z[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
      dist += diff * diff;
    }
    result.s_star = std::max(result.s_star, std::sqrt(dist));
    const double q = quasi_static_gap(params, ts[k + 1]);
    double dev = 0.0;
    for (double g : gzn) dev += (g - q) * (g - q);
    result.m_star = std::max(result.m_star, std::sqrt(dev));

    mon_x.update(gxp, gxn, ts[k], ts[k + 1]);
    mon_z.update(gzp, gzn, ts[k], ts[k + 1]);
    bool escaped = false;
    for (std::size_t i = 0; i < nd; ++i) {
      if (gxn[i] > limit) {
        if (!mon_x.found())
          throw DomainEscape(ts[k + 1], static_cast<int>(i) + 1, gxn[i]);
        escaped = true;
      }
    }
    if (escaped) {
      result.truncated = true;
      break;
    }
    std::swap(gxp, gxn);
    std::swap(gzp, gzn);
  }
  result.break_x = mon_x.censored_at(sched.end);
  result.break_z = mon_z.censored_at(sched.end);
  return result;
}

}  // namespace chainbreak::engine
