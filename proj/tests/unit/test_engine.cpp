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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "chainbreak/engine.hpp"
#include "chainbreak/error.hpp"
#include "chainbreak/oracle.hpp"
#include "chainbreak/spectral.hpp"
#include "chainbreak/stats.hpp"
#include "doctest.h"

using namespace chainbreak;
using namespace chainbreak::engine;
using doctest::Approx;

namespace {

SimGrid uniform_grid(double dt, double horizon = kInfiniteHorizon) {
  SimGrid g;
  g.coarse_dt = dt;
  g.fine_dt = dt;
  g.window_W = 0.0;
  g.horizon = horizon;
  return g;
}

// Records positions at the requested times (which must be checkpoints).
struct Recorder {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  PathObserver observer() {
    return [this](double t, std::span<const double> x) {
      for (double c : times)
        if (t == c) states.emplace_back(x.begin(), x.end());
    };
  }
};

}  // namespace

TEST_CASE("first_break examples") {
  const std::vector<double> a{1.9}, b{2.05};
  auto c = first_break(a, b, 10.0, 11.0, 2.0);
  REQUIRE(c);
  CHECK(c->tau == Approx(10.0 + 0.1 / 0.15).epsilon(1e-15));
  CHECK(c->tau == Approx(10.6667).epsilon(1e-5));
  CHECK(c->link == 1);

  const std::vector<double> low{1.5, 1.6}, low2{1.7, 1.9};
  CHECK_FALSE(first_break(low, low2, 0.0, 1.0, 2.0));

  // Link 1 crosses at 0.8, link 2 at 0.5.
  const std::vector<double> p{1.6, 1.5}, n{2.1, 2.5};
  c = first_break(p, n, 0.0, 1.0, 2.0);
  REQUIRE(c);
  CHECK(c->link == 2);
  CHECK(c->tau == Approx(0.5));

  // Exact tie goes to the smaller index.
  const std::vector<double> tp{1.0, 1.0}, tn{3.0, 3.0};
  c = first_break(tp, tn, 0.0, 1.0, 2.0);
  REQUIRE(c);
  CHECK(c->link == 1);
}

TEST_CASE("first_break at t*") {
  // Gaps sit just below b only because of rounding.
  auto c = first_break(std::vector<double>{1.9, 1.9, 1.9},
                       std::vector<double>{2.0 - 1e-15, 2.0 - 3e-15, 2.0 - 2e-15},
                       99.0, 100.0, 2.0, 100.0);
  REQUIRE(c);
  CHECK(c->tau == 100.0);
  CHECK(c->link == 1);
  // Interpolated times never exceed t*.
  c = first_break(std::vector<double>{1.0}, std::vector<double>{3.0}, 99.0,
                  101.0, 2.0, 99.5);
  REQUIRE(c);
  CHECK(c->tau == 99.5);
}

TEST_CASE("make_schedule") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  SimGrid g;
  g.coarse_dt = 0.7;
  g.fine_dt = 0.05;
  g.window_W = 20.0;
  SimOptions o;
  o.checkpoints = {3.3, 299.987, 150.0};
  const auto s = make_schedule(p, g, o);
  CHECK(s.times.front() == 0.0);
  CHECK(s.times.back() == 300.0);
  CHECK(s.end == 300.0);
  CHECK(std::is_sorted(s.times.begin(), s.times.end()));
  for (double c : o.checkpoints)
    CHECK(std::find(s.times.begin(), s.times.end(), c) != s.times.end());
  CHECK(std::find(s.times.begin(), s.times.end(), 280.0) != s.times.end());
  for (std::size_t k = 0; k + 1 < s.times.size(); ++k) {
    const double dt = s.times[k + 1] - s.times[k];
    CHECK(dt > 0.0);
    CHECK(dt <= (s.times[k] >= 280.0 - 1e-9 ? 0.05 : 0.7) + 1e-9);
  }
  o.track_all_links = true;
  CHECK(make_schedule(p, g, o).end == Approx(320.0));
  o.stop_time = 10.0;
  CHECK(make_schedule(p, g, o).times.back() == 10.0);
  g.fine_dt = 1.0;
  CHECK_THROWS_AS(make_schedule(p, g, {}), ParameterError);
}

TEST_CASE("auto grid") {
  const ChainParams p{3, 1e-3, 0.05, 2.0};
  const auto g = auto_grid(p, {1.0, 2.0, 0.0, 0.5});
  CHECK(g.coarse_dt == 0.05);
  CHECK(g.fine_dt == Approx(0.0025));
  const double w = 3 * std::sqrt(6.0) * 50 * std::sqrt(std::log(50.0));
  CHECK(g.window_W == Approx(w).epsilon(1e-14));
  CHECK(auto_grid(p, {0.1, 0.1, 0.0, 0.5}).coarse_dt == 0.5);
  CHECK(default_window({3, 0.0, 0.05, 2.0}) == 0.0);
  CHECK(default_window({3, 0.1, 0.05, 2.0}) == Approx(0.05 * 30.0));
}

TEST_CASE("zero noise and zero pulling stay at equilibrium") {
  const ChainParams p{3, 0.0, 0.0, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  auto rng = stats::seed_stream(1, 0);
  const auto ev = simulate_nonlinear(p, c, uniform_grid(0.1, 10.0), rng);
  CHECK(ev.censored);
  CHECK(ev.link == 0);
  CHECK(ev.tau == 10.0);
  auto rng2 = stats::seed_stream(1, 0);
  const auto lin =
      simulate_linear_constant(p, 1.0, uniform_grid(0.1, 10.0), rng2);
  CHECK(lin.censored);
}

TEST_CASE("deterministic nonlinear break converges as the step shrinks") {
  const ChainParams p{2, 0.01, 0.0, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  auto tau = [&](double dt) {
    auto r = stats::seed_stream(0, 0);
    return simulate_nonlinear(p, c, uniform_grid(dt), r).tau;
  };
  const double ref = tau(1e-3);
  double prev = kInfiniteHorizon;
  for (double dt : {0.4, 0.2, 0.1, 0.05}) {
    const double err = std::abs(tau(dt) - ref);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.1);
  // Quadratic: the Euler chain reproduces the exact linear break.
  const Potential q = validated(make_quadratic_potential(1.0), 2.0);
  auto r1 = stats::seed_stream(0, 0), r2 = r1;
  CHECK(simulate_nonlinear(p, q, uniform_grid(0.1), r1).tau ==
        Approx(simulate_linear_constant(p, 1.0, uniform_grid(0.1), r2).tau)
            .epsilon(1e-6));
}

TEST_CASE("zero-noise linear chains follow i q_t + eps g_t") {
  const ChainParams p{4, 0.01, 0.0, 2.0};
  const auto spec = eigendecompose(4);
  const std::vector<double> checks{1.0, 37.5, 200.0, 390.0};
  SimOptions o;
  o.checkpoints = checks;
  for (const Potential& pot :
       {validated(make_quadratic_potential(1.0), 2.0),
        validated(make_cosh_potential(), 2.0)}) {
    Recorder rec{checks, {}};
    o.observer = rec.observer();
    auto rng = stats::seed_stream(3, 0);
    const bool quadratic = pot.kind() == PotentialKind::kQuadratic;
    if (quadratic)
      simulate_linear_constant(p, 1.0, uniform_grid(0.5), rng, o);
    else
      simulate_linear_timevarying(p, pot, uniform_grid(0.5), rng, o);
    REQUIRE(rec.states.size() == checks.size());
    for (std::size_t k = 0; k < checks.size(); ++k) {
      const double t = checks[k];
      const Eigen::VectorXd g = drift_g(pot, p, spec, t);
      for (int i = 1; i < 4; ++i) {
        const double expect = i * quasi_static_gap(p, t) + p.eps * g(i - 1);
        CHECK(rec.states[k][static_cast<std::size_t>(i)] ==
              Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("boundary pins hold at every step in every simulator") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  int bad = 0, seen = 0;
  auto check_pins = [&](double t, std::span<const double> x) {
    ++seen;
    if (x[0] != 0.0 || x[3] != 3.0 + p.eps * t) ++bad;
  };
  SimOptions o;
  o.observer = check_pins;
  const SimGrid g = auto_grid(p, *c.bounds());
  auto r1 = stats::seed_stream(5, 0), r2 = r1, r3 = r1, r4 = r1;
  simulate_nonlinear(p, c, g, r1, o);
  simulate_linear_constant(p, c.u2(2.0), g, r2, o);
  simulate_linear_timevarying(p, c, g, r3, o);
  simulate_coupled(p, c, g, r4, o);
  CHECK(seen > 1000);
  CHECK(bad == 0);
}

TEST_CASE("deterministic replay") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  const SimGrid g = auto_grid(p, *c.bounds());
  SimOptions o;
  o.track_all_links = true;
  for (int rep = 0; rep < 3; ++rep) {
    auto a = stats::seed_stream(11, rep), b = stats::seed_stream(11, rep);
    const auto x = simulate_nonlinear(p, c, g, a, o);
    const auto y = simulate_nonlinear(p, c, g, b, o);
    CHECK(x.tau == y.tau);
    CHECK(x.link == y.link);
    CHECK(x.link_times == y.link_times);
    auto e = stats::seed_stream(11, rep), f = stats::seed_stream(11, rep);
    const auto u = simulate_linear_constant(p, 1.5, g, e, o);
    const auto v = simulate_linear_constant(p, 1.5, g, f, o);
    CHECK(u.tau == v.tau);
    CHECK(u.link_times == v.link_times);
  }
}

TEST_CASE("break times never exceed t*") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  const SimGrid g = auto_grid(p, *c.bounds());
  const auto plan = LinearPlan::constant(p, 1.0, g);
  for (int i = 0; i < 200; ++i) {
    auto r = stats::seed_stream(8, i), s = r;
    const auto a = simulate_nonlinear(p, c, g, r);
    const auto b = simulate_linear(plan, s);
    CHECK_FALSE(a.censored);
    CHECK_FALSE(b.censored);
    CHECK(a.tau <= t_star(p));
    CHECK(b.tau <= t_star(p));
  }
}

TEST_CASE("tracking all links records every link time") {
  const ChainParams p{4, 0.01, 0.1, 2.0};
  SimOptions o;
  o.track_all_links = true;
  const auto plan = LinearPlan::constant(p, 1.0, auto_grid(p, {1, 1, 0, 0.5}), o);
  for (int i = 0; i < 20; ++i) {
    auto r = stats::seed_stream(2, i);
    const auto ev = simulate_linear(plan, r, o);
    REQUIRE(ev.link_times.size() == 4);
    CHECK(ev.link_times[static_cast<std::size_t>(ev.link - 1)] == ev.tau);
    for (double t : ev.link_times) {
      CHECK(std::isfinite(t));
      CHECK(t >= ev.tau);
    }
  }
}

TEST_CASE("exact transitions are step-size invariant") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  auto marginal = [&](double dt) {
    SimOptions o;
    o.stop_time = 5.0;
    const auto plan = LinearPlan::constant(p, 1.0, uniform_grid(dt), o);
    std::vector<double> var(2, 0.0);
    const auto& ts = plan.schedule().times;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k)
      for (std::size_t j = 0; j < 2; ++j)
        var[j] = plan.decay(k, j) * plan.decay(k, j) * var[j] +
                 plan.noise_sd(k, j) * plan.noise_sd(k, j);
    return var;
  };
  const auto a = marginal(0.5), b = marginal(0.25);
  const auto lam = eigendecompose(3).lambdas;
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(a[j] - b[j]) <= 1e-12);
    CHECK(a[j] == Approx(oracle::ou_variance(-lam[j], 0.1, 5.0)).epsilon(1e-12));
  }
}

TEST_CASE("constant plan run-length coefficients match per-step values") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  SimGrid g;
  g.coarse_dt = 0.3;
  g.fine_dt = 0.01;
  g.window_W = 10.0;
  SimOptions o;
  o.checkpoints = {1.234, 100.0};
  const auto plan = LinearPlan::constant(p, 2.0, g, o);
  const auto& ts = plan.schedule().times;
  const auto lam = plan.spectrum().lambdas;
  for (std::size_t k = 0; k + 1 < ts.size(); k += 37) {
    const double dt = ts[k + 1] - ts[k];
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(plan.decay(k, j) ==
            Approx(std::exp(2.0 * lam[j] * dt)).epsilon(1e-12));
  }
  CHECK(plan.runs().size() < ts.size() / 4);
}

TEST_CASE("time-varying chain with a quadratic potential equals the constant one") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  const Potential q = validated(make_quadratic_potential(1.0), 2.0);
  const SimGrid g = auto_grid(p, *q.bounds());
  for (int i = 0; i < 3; ++i) {
    std::vector<std::vector<double>> a, b;
    SimOptions oa, ob;
    oa.observer = [&](double, std::span<const double> x) {
      a.emplace_back(x.begin(), x.end());
    };
    ob.observer = [&](double, std::span<const double> x) {
      b.emplace_back(x.begin(), x.end());
    };
    auto r1 = stats::seed_stream(4, i), r2 = r1;
    const auto e1 = simulate_linear_constant(p, 1.0, g, r1, oa);
    const auto e2 = simulate_linear_timevarying(p, q, g, r2, ob);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      for (std::size_t m = 0; m < a[k].size(); ++m)
        worst = std::max(worst, std::abs(a[k][m] - b[k][m]));
    CHECK(worst <= 1e-10);
    CHECK(e1.link == e2.link);
  }
}

TEST_CASE("mode variances of the constant chain match the OU oracle") {
  const ChainParams p{3, 0.01, 0.1, 2.0};
  const std::vector<double> checks{5.0};
  SimOptions o;
  o.checkpoints = checks;
  o.stop_time = 5.0;
  const auto plan = LinearPlan::constant(p, 1.0, uniform_grid(0.1), o);
  const auto spec = plan.spectrum();
  const Eigen::VectorXd g = drift_g(make_quadratic_potential(1.0), p, spec, 5.0);
  const int n = 4000;
  std::vector<std::vector<double>> modes(2);
  for (int i = 0; i < n; ++i) {
    Recorder rec{checks, {}};
    o.observer = rec.observer();
    auto r = stats::seed_stream(9, i);
    simulate_linear(plan, r, o);
    Eigen::VectorXd dev(2);
    for (int k = 1; k < 3; ++k)
      dev(k - 1) = rec.states[0][static_cast<std::size_t>(k)] -
                   k * quasi_static_gap(p, 5.0) - p.eps * g(k - 1);
    const Eigen::VectorXd y = spec.q * dev;
    modes[0].push_back(y(0));
    modes[1].push_back(y(1));
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const double expect = oracle::ou_variance(-spec.lambdas[j], 0.1, 5.0);
    const double se = stats::variance_standard_error(expect, n);
    CHECK(std::abs(stats::variance(modes[j]) - expect) <= 3 * se);
    CHECK(std::abs(stats::mean(modes[j])) <= 3 * std::sqrt(expect / n));
  }
}

TEST_CASE("time-varying single mode matches z_variance") {
  const ChainParams p{2, 0.01, 0.1, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  const double t = t_star(p) / 2;
  const std::vector<double> checks{t};
  SimOptions o;
  o.checkpoints = checks;
  o.stop_time = t;
  const auto plan = LinearPlan::time_varying(p, c, uniform_grid(0.5), o);
  const double g = drift_g(c, p, plan.spectrum(), t)(0);
  const int n = 4000;
  std::vector<double> ys;
  for (int i = 0; i < n; ++i) {
    Recorder rec{checks, {}};
    o.observer = rec.observer();
    auto r = stats::seed_stream(10, i);
    simulate_linear(plan, r, o);
    ys.push_back(rec.states[0][1] - quasi_static_gap(p, t) - p.eps * g);
  }
  const double expect = oracle::z_variance(c, p, t, 2.0);
  CHECK(std::abs(stats::variance(ys) - expect) <=
        3 * stats::variance_standard_error(expect, n));
}

TEST_CASE("nonlinear chain: mean interior gap at t*/2") {
  const ChainParams p{3, 1e-3, 0.05, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  const double t = t_star(p) / 2;
  const std::vector<double> checks{t};
  SimOptions o;
  o.checkpoints = checks;
  o.stop_time = t;
  const SimGrid g = auto_grid(p, *c.bounds());
  const int n = 1000;
  std::vector<double> gaps;
  for (int i = 0; i < n; ++i) {
    Recorder rec{checks, {}};
    o.observer = rec.observer();
    auto r = stats::seed_stream(12, i);
    simulate_nonlinear(p, c, g, r, o);
    gaps.push_back(rec.states[0][2] - rec.states[0][1]);
  }
  const double se = std::sqrt(stats::variance(gaps) / n);
  CHECK(quasi_static_gap(p, t) == 1.5);
  CHECK(std::abs(stats::mean(gaps) - 1.5) <= 3 * se);
}

TEST_CASE("Euler-Maruyama converges strongly for the quadratic chain") {
  // Reference: the same Brownian path on a 64x finer grid.
  const ChainParams p{3, 0.05, 0.3, 2.0};
  const Potential q = validated(make_quadratic_potential(1.0), 2.0);
  const double horizon = t_star(p) / 2;
  const double dt = 0.2;
  const int fine = 64, paths = 200;
  const auto steps = static_cast<int>(std::lround(horizon / dt)) * fine;
  const double h = horizon / steps;
  double mse_coarse = 0.0, mse_half = 0.0;
  for (int i = 0; i < paths; ++i) {
    auto r = stats::seed_stream(13, i);
    std::vector<std::vector<double>> dw(static_cast<std::size_t>(steps),
                                        std::vector<double>(2));
    for (auto& w : dw)
      for (auto& v : w) v = std::sqrt(h) * r.normal();
    auto run = [&](int agg) {
      std::vector<double> x{0, 1, 2, 3};
      std::vector<double> inc(2);
      for (int k = 0; k < steps; k += agg) {
        inc.assign(2, 0.0);
        for (int m = 0; m < agg; ++m)
          for (int j = 0; j < 2; ++j) inc[static_cast<std::size_t>(j)] +=
              dw[static_cast<std::size_t>(k + m)][static_cast<std::size_t>(j)];
        nonlinear_euler_step(q, p, x, (k + agg) * h, agg * h, inc);
      }
      return x;
    };
    const auto ref = run(1), a = run(fine), b = run(fine / 2);
    for (int j = 1; j < 3; ++j) {
      mse_coarse += std::pow(a[static_cast<std::size_t>(j)] - ref[static_cast<std::size_t>(j)], 2);
      mse_half += std::pow(b[static_cast<std::size_t>(j)] - ref[static_cast<std::size_t>(j)], 2);
    }
  }
  CHECK(mse_coarse > 0.0);
  CHECK(mse_coarse / mse_half >= 1.5);
}

TEST_CASE("early breaks are rare") {
  const ChainParams p{3, 1e-3, 0.05, 2.0};
  const auto plan = LinearPlan::constant(p, 1.0, auto_grid(p, {1, 1, 0, 0.5}));
  const double cutoff =
      t_star(p) - 2 * std::sqrt(6.0) * 50 * std::sqrt(std::log(50.0));
  int early = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    auto r = stats::seed_stream(14, i);
    if (simulate_linear(plan, r).tau < cutoff) ++early;
  }
  CHECK(early <= 0.02 * n);
}

TEST_CASE("large noise past the break does not abort a tracked run") {
  const ChainParams p{3, 0.01, 2.0, 2.0};
  const Potential c =
      validated(make_cosh_potential(), 2.0, std::vector<double>{0.05});
  SimOptions o;
  o.track_all_links = true;
  for (int i = 0; i < 20; ++i) {
    auto r = stats::seed_stream(15, i);
    const auto ev = simulate_nonlinear(p, c, uniform_grid(0.01), r, o);
    CHECK_FALSE(ev.censored);
    CHECK(ev.tau <= t_star(p));
  }
  const DomainEscape e(3.0, 2, 2.5);
  CHECK(e.code() == ErrorCode::kDomainEscape);
  CHECK(e.link() == 2);
  CHECK(e.gap() == 2.5);
}

TEST_CASE("coupled runs") {
  SUBCASE("quadratic: both chains coincide") {
    const ChainParams p{3, 0.01, 0.1, 2.0};
    const Potential q = validated(make_quadratic_potential(1.0), 2.0);
    for (int i = 0; i < 5; ++i) {
      auto r = stats::seed_stream(16, i);
      const auto res = simulate_coupled(p, q, auto_grid(p, *q.bounds()), r);
      CHECK(res.s_star <= 1e-10);
      CHECK(res.break_x.tau == Approx(res.break_z.tau).epsilon(1e-10));
      CHECK(res.m_star > 0.0);
    }
  }
  SUBCASE("zero noise, cosh: gap shrinks with eps") {
    const Potential c = validated(make_cosh_potential(), 2.0);
    double prev = kInfiniteHorizon;
    for (double eps : {1e-2, 1e-3}) {
      const ChainParams p{3, eps, 0.0, 2.0};
      auto r = stats::seed_stream(0, 0);
      const auto res = simulate_coupled(p, c, auto_grid(p, *c.bounds()), r);
      CHECK(res.s_star > 0.0);
      CHECK(res.s_star < prev);
      prev = res.s_star;
    }
  }
}

TEST_CASE("time-varying plan coefficients compose to the oracle variance") {
  const ChainParams p{2, 0.01, 0.1, 2.0};
  const Potential c = validated(make_cosh_potential(), 2.0);
  const double t = 150.0;
  SimOptions o;
  o.stop_time = t;
  const auto plan =
      LinearPlan::time_varying(p, c, auto_grid(p, *c.bounds()), o);
  const auto& ts = plan.schedule().times;
  REQUIRE(ts.back() == t);
  double var = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    var = plan.decay(k, 0) * plan.decay(k, 0) * var +
          plan.noise_sd(k, 0) * plan.noise_sd(k, 0);
  CHECK(var == Approx(oracle::z_variance(c, p, t, 2.0)).epsilon(1e-10));
}
