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

#include <cmath>

#include "chainbreak/error.hpp"
#include "chainbreak/oracle.hpp"
#include "chainbreak/spectral.hpp"
#include "doctest.h"

using namespace chainbreak;
using doctest::Approx;

TEST_CASE("ou_variance and ou_covariance") {
  CHECK(oracle::ou_variance(1.0, 1.0, 0.0) == 0.0);
  CHECK(oracle::ou_variance(1.0, 1.0, 1e3) == Approx(0.5).epsilon(1e-15));
  CHECK(oracle::ou_variance(1.0, 1.0, 1.0) ==
        Approx(0.43233235838169365).epsilon(1e-15));
  CHECK(oracle::ou_covariance(1.0, 1.0, 1.0, 2.0) ==
        Approx(0.15904618640178919).epsilon(1e-14));
  CHECK(oracle::ou_covariance(1.0, 1.0, 2.0, 1.0) ==
        oracle::ou_covariance(1.0, 1.0, 1.0, 2.0));
  CHECK(oracle::ou_covariance(1.0, 1.0, 0.0, 3.0) == 0.0);
  for (double u : {0.3, 1.0, 7.0})
    for (double t : {1e-6, 0.1, 2.0, 50.0})
      CHECK(std::abs(oracle::ou_covariance(u, 0.7, t, t) -
                     oracle::ou_variance(u, 0.7, t)) <= 1e-12);
  CHECK_THROWS_AS(oracle::ou_variance(0.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(oracle::ou_covariance(-1.0, 1.0, 1.0, 2.0), ParameterError);
}

TEST_CASE("z_variance and yz_covariance against an independent quadrature") {
  const Potential c = make_cosh_potential();
  const ChainParams p3{3, 0.01, 0.1, 2.0};
  CHECK(oracle::z_variance(c, p3, 0.0) == 0.0);
  CHECK(oracle::z_variance(c, p3, 100.0) ==
        Approx(0.004736920404313428).epsilon(1e-9));
  CHECK(oracle::z_variance(c, p3, 2.0) ==
        Approx(0.004908355329377219).epsilon(1e-9));
  CHECK(oracle::z_variance(c, {2, 0.01, 0.1, 2.0}, 50.0, 2.0) ==
        Approx(0.0024245756048076337).epsilon(1e-9));
  CHECK(oracle::yz_covariance(c, p3, std::cosh(1.0), 100.0) ==
        Approx(0.0038480502765879917).epsilon(1e-9));
  CHECK(oracle::yz_covariance(c, p3, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(oracle::z_variance(c, p3, 300.5), DomainError);
  CHECK_THROWS_AS(oracle::yz_covariance(c, p3, 0.0, 1.0), ParameterError);
}

TEST_CASE("quadratic potentials reduce to the OU closed forms") {
  for (double u : {0.5, 1.0, 4.0}) {
    const Potential q = make_quadratic_potential(u);
    const ChainParams p{3, 1e-3, 0.3, 2.0};
    for (int k = 0; k < 20; ++k) {
      const double t = 0.01 + k * k * 7.5;
      const double ou = oracle::ou_variance(u, 0.3, t);
      CHECK(oracle::z_variance(q, p, t) == Approx(ou).epsilon(1e-8));
      CHECK(oracle::yz_covariance(q, p, u, t) == Approx(ou).epsilon(1e-8));
      CHECK(std::abs(oracle::yz_distance_sq(q, p, u, t)) <= 1e-10);
      // Eigenmode convention: rate -lambda_j u.
      CHECK(oracle::z_variance(q, p, t, 3.0) ==
            Approx(oracle::ou_variance(3.0 * u, 0.3, t)).epsilon(1e-8));
    }
  }
}

TEST_CASE("yz_distance_sq is nonnegative") {
  const Potential c = make_cosh_potential();
  const ChainParams p{3, 0.01, 0.1, 2.0};
  for (double u : {0.5, 1.0, std::cosh(1.0), 3.0})
    for (double t = 0.0; t <= 300.0; t += 12.5)
      CHECK(oracle::yz_distance_sq(c, p, u, t) >= -1e-12);
}

TEST_CASE("first-order asymptotics in the terminal window") {
  const Potential c = make_cosh_potential();
  const ChainParams p{3, 1e-4, 1e-2, 2.0};
  const double ts = t_star(p);
  const double u = std::cosh(1.0);
  const double s2 = p.sigma * p.sigma;
  const double lr = std::log(p.sigma / p.eps);
  const double window = 3.0 * std::sqrt(6.0) * (p.sigma / p.eps) * std::sqrt(lr);
  for (double t : {ts / 2, ts - window, ts - window / 2, ts}) {
    const double phi = stiffness_at(c, p, t);
    CHECK(oracle::z_variance(c, p, t) == Approx(s2 / (2 * phi)).epsilon(0.01));
  }
  for (double t : {ts - window / 4, ts}) {
    const double phi = stiffness_at(c, p, t);
    CHECK(oracle::yz_covariance(c, p, u, t) ==
          Approx(s2 / (phi + u)).epsilon(0.01));
  }
  const double envelope =
      s2 * 10.0 * (s2 * lr + p.eps * std::abs(std::log(p.eps)));
  CHECK(oracle::yz_distance_sq(c, p, u, ts) <= envelope);
}

TEST_CASE("increment_msq") {
  const Potential q = make_quadratic_potential(1.0);
  const ChainParams p{3, 1e-3, 1.0, 2.0};
  CHECK(oracle::increment_msq(q, p, 5.0, 5.0) == 0.0);
  const double ref = oracle::ou_variance(1, 1, 5) + oracle::ou_variance(1, 1, 5.5) -
                     2 * oracle::ou_covariance(1, 1, 5, 5.5);
  CHECK(oracle::increment_msq(q, p, 5.0, 5.5) ==
        Approx(0.39346582592143996).epsilon(1e-9));
  CHECK(oracle::increment_msq(q, p, 5.0, 5.5) == Approx(ref).epsilon(1e-9));
  CHECK_THROWS_AS(oracle::increment_msq(q, p, 1.0, 2.5), DomainError);
  CHECK_THROWS_AS(oracle::increment_msq(q, p, 2.0, 1.0), DomainError);
}

TEST_CASE("increment_msq obeys the Hoelder-type bound") {
  for (const Potential& raw :
       {make_quadratic_potential(1.0), make_quadratic_potential(4.0),
        make_cosh_potential()}) {
    const Potential p = validated(raw, 2.0);
    const double c = oracle::hoelder_constant(*p.bounds());
    const ChainParams params{3, 0.01, 0.2, 2.0};
    for (double t1 : {0.0, 3.0, 150.0, 299.0})
      for (double h : {1e-4, 0.01, 0.3, 1.0}) {
        const double t2 = std::min(t1 + h, 300.0);
        CHECK(oracle::increment_msq(p, params, t1, t2) <=
              c * 0.04 * (t2 - t1) * (1 + 1e-9));
      }
  }
  CHECK(oracle::hoelder_constant({1.0, 2.0, 0.0, 0.5}) == 3.0);
}

TEST_CASE("scalar process spec dispatch") {
  const Potential c = make_cosh_potential();
  const ChainParams p{3, 0.01, 0.5, 2.0};
  oracle::ScalarProcessSpec ou{oracle::ScalarKind::kConstantRate, 0.2, 2.0, 1.5};
  CHECK(oracle::variance(ou, c, p, 4.0) == oracle::ou_variance(3.0, 0.2, 4.0));
  oracle::ScalarProcessSpec tv{oracle::ScalarKind::kTimeVarying, 0.1, 1.0, 1.0};
  CHECK(oracle::variance(tv, c, p, 100.0) ==
        Approx(0.004736920404313428).epsilon(1e-9));
}
