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

#ifndef CHAINBREAK_ENGINE_HPP_
#define CHAINBREAK_ENGINE_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chainbreak/model.hpp"
#include "chainbreak/spectral.hpp"
#include "chainbreak/stats.hpp"

namespace chainbreak::engine {

// Piecewise-uniform time discretization: coarse_dt on [0, t* - W], fine_dt on
// the terminal window [t* - W, t*]. `horizon` replaces t* when eps == 0.
struct SimGrid {
  double coarse_dt = 0.1;
  double fine_dt = 0.005;
  double window_W = 0.0;
  double horizon = kInfiniteHorizon;
};

// Default window length 3 gamma (sigma/eps) sqrt(ln(sigma/eps)), clamped to t*.
double default_window(const ChainParams& params);

// coarse_dt = min(0.5, 0.1 / kappa_max), fine_dt = coarse_dt / 20, window per
// default_window(). `horizon` is only consulted when eps == 0.
SimGrid auto_grid(const ChainParams& params, const PotentialBounds& bounds,
                  double horizon = kInfiniteHorizon);

void validate_grid(const SimGrid& grid, const ChainParams& params);

using PathObserver =
    std::function<void(double t, std::span<const double> positions)>;

struct SimOptions {
  // Keep integrating after the chain break until every link has reached b
  // (or the extended horizon t* + window_W runs out); fills link_times.
  bool track_all_links = false;
  // Extra grid points the schedule must hit exactly.
  std::vector<double> checkpoints;
  // Truncate the run; the path is censored if it has not broken by then.
  double stop_time = kInfiniteHorizon;
  // Called at t = 0 and after every step with all d+1 positions.
  PathObserver observer;
};

// Grid times for a run, including t = 0 and the final time.
struct Schedule {
  std::vector<double> times;
  double t_star = kInfiniteHorizon;
  double end = 0.0;
};

Schedule make_schedule(const ChainParams& params, const SimGrid& grid,
                       const SimOptions& options);

struct Crossing {
  double tau = 0.0;
  int link = 0;  // 1-based
};

// Earliest linearly interpolated crossing of b_break between two samples;
// ties go to the smallest link. At the t* sample a maximal gap >= b (up to
// rounding) yields tau = t*, and tau never exceeds t*.
std::optional<Crossing> first_break(std::span<const double> gap_prev,
                                    std::span<const double> gap_next,
                                    double t_prev, double t_next,
                                    double b_break,
                                    double t_star = kInfiniteHorizon);

void gaps_of(std::span<const double> positions, std::span<double> gaps);

// One Euler-Maruyama step of the nonlinear chain. `dw` holds the d-1
// Brownian increments (variance dt) of the interior particles; boundaries are
// re-pinned at t_next.
void nonlinear_euler_step(const Potential& p, const ChainParams& params,
                          std::span<double> x, double t_next, double dt,
                          std::span<const double> dw);

// Same step for the linearized chain with stiffness phi = U''(q_t) at the
// left endpoint t_next - dt.
void linearized_euler_step(double phi, const ChainParams& params,
                           std::span<double> x, double t_next, double dt,
                           std::span<const double> dw);

BreakEvent simulate_nonlinear(const ChainParams& params, const Potential& p,
                              const SimGrid& grid, stats::RandomStream& rng,
                              const SimOptions& options = {});

// Per-step exact Gaussian transition coefficients of the eigenmodes of a
// linear chain, shared by every path on the same schedule.
class LinearPlan {
 public:
  static LinearPlan constant(const ChainParams& params, double u_curv,
                             const SimGrid& grid,
                             const SimOptions& options = {});
  static LinearPlan time_varying(const ChainParams& params, const Potential& p,
                                 const SimGrid& grid,
                                 const SimOptions& options = {});

  const ChainParams& params() const noexcept { return params_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  std::size_t modes() const noexcept { return spectrum_.lambdas.size(); }

  // Coefficients for step k (times[k] -> times[k+1]) and mode j:
  //   y <- decay * y + drift + noise_sd * xi.
  double decay(std::size_t k, std::size_t j) const {
    return decay_[row_of(k) * modes() + j];
  }
  double drift(std::size_t k, std::size_t j) const {
    return drift_[row_of(k) * modes() + j];
  }
  double noise_sd(std::size_t k, std::size_t j) const {
    return noise_sd_[row_of(k) * modes() + j];
  }

  // Steps [previous end, end) use coefficient rows row, row + stride, ...
  // Constant-coefficient plans share one row per uniform stretch.
  struct Run {
    std::size_t end = 0;
    std::size_t row = 0;
    std::size_t stride = 0;
  };
  const std::vector<Run>& runs() const noexcept { return runs_; }
  const double* row_decay(std::size_t row) const {
    return decay_.data() + row * modes();
  }
  const double* row_drift(std::size_t row) const {
    return drift_.data() + row * modes();
  }
  const double* row_noise_sd(std::size_t row) const {
    return noise_sd_.data() + row * modes();
  }

 private:
  LinearPlan(const ChainParams& params, const SimGrid& grid,
             const SimOptions& options);
  std::size_t row_of(std::size_t k) const;

  ChainParams params_;
  Schedule schedule_;
  Spectrum spectrum_;
  std::vector<double> decay_, drift_, noise_sd_;
  std::vector<Run> runs_;
};

// Simulates the modes with the plan's exact transitions and reconstructs
// positions i q_t + eps g^i_t + (Q^T y)^i. The options must match those the
// plan was built with (checkpoints, stop_time) apart from the observer.
BreakEvent simulate_linear(const LinearPlan& plan, stats::RandomStream& rng,
                           const SimOptions& options = {});

BreakEvent simulate_linear_constant(const ChainParams& params, double u_curv,
                                    const SimGrid& grid,
                                    stats::RandomStream& rng,
                                    const SimOptions& options = {});

BreakEvent simulate_linear_timevarying(const ChainParams& params,
                                       const Potential& p, const SimGrid& grid,
                                       stats::RandomStream& rng,
                                       const SimOptions& options = {});

struct CoupledResult {
  double s_star = 0.0;  // sup_t ||Z_t - X_t||_2
  double m_star = 0.0;  // sup_t (sum_i |Z^i - Z^{i-1} - q_t|^2)^{1/2}
  BreakEvent break_z;
  BreakEvent break_x;
  // True when the nonlinear chain left the validated domain after its break
  // and the suprema only cover the run up to that point.
  bool truncated = false;
};

// Advances the nonlinear chain X and the linearized chain Z with the same
// Brownian increments (Euler-Maruyama for both) up to t*.
CoupledResult simulate_coupled(const ChainParams& params, const Potential& p,
                               const SimGrid& grid, stats::RandomStream& rng,
                               const SimOptions& options = {});

}  // namespace chainbreak::engine

#endif  // CHAINBREAK_ENGINE_HPP_
