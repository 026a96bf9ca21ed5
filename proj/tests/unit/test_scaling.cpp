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
#include "chainbreak/model.hpp"
#include "chainbreak/scaling.hpp"
#include "doctest.h"

using namespace chainbreak;
using doctest::Approx;

TEST_CASE("reduce_to_standard") {
  const auto id = scaling::reduce_to_standard(1.0, 2.0, 0.01, 0.1);
  CHECK(id.eps_std == 0.01);
  CHECK(id.sigma_std == 0.1);
  CHECK(id.time_factor == 1.0);
  const auto s = scaling::reduce_to_standard(4.0, 3.0, 0.02, 0.2);
  CHECK(s.eps_std == Approx(0.0025).epsilon(1e-15));
  CHECK(s.sigma_std == Approx(0.05).epsilon(1e-15));
  CHECK(s.time_factor == 0.25);
  CHECK_THROWS_AS(scaling::reduce_to_standard(0.0, 2.0, 0.01, 0.1), ParameterError);
  CHECK_THROWS_AS(scaling::reduce_to_standard(1.0, 1.0, 0.01, 0.1), ParameterError);
  CHECK_THROWS_AS(scaling::reduce_to_standard(1.0, 2.0, 0.0, 0.1), ParameterError);
  CHECK_THROWS_AS(scaling::reduce_to_standard(1.0, 2.0, 0.01, -0.1), ParameterError);
}

TEST_CASE("reduction round trip") {
  for (double u : {0.3, 1.0, 4.0, 11.0})
    for (double b : {1.2, 2.0, 3.5})
      for (double eps : {1e-4, 0.02, 0.5})
        for (double sigma : {0.0, 0.05, 1.3}) {
          const auto s = scaling::reduce_to_standard(u, b, eps, sigma);
          const auto g = scaling::expand_from_standard(u, b, s);
          CHECK(std::abs(g.eps - eps) <= 1e-14 * eps);
          CHECK(std::abs(g.sigma - sigma) <= 1e-14 * std::max(sigma, 1e-300));
        }
}

TEST_CASE("reduced problem shares t*") {
  const auto s = scaling::reduce_to_standard(4.0, 3.0, 0.02, 0.2);
  const double general = t_star({3, 0.02, 0.2, 3.0});
  const double standard = t_star({3, s.eps_std, s.sigma_std, 2.0});
  CHECK(standard * s.time_factor == Approx(general).epsilon(1e-14));
}

TEST_CASE("gumbel_shift") {
  const auto same = scaling::gumbel_shift(1.3, 0.8, 0.0);
  CHECK(same.a == 1.3);
  CHECK(same.b == 0.8);
  const auto two = scaling::gumbel_shift(1.0, 2.0, std::log(2.0) / 2);
  CHECK(two.a == Approx(2.0).epsilon(1e-15));
  CHECK(two.b == 2.0);
  CHECK_THROWS_AS(scaling::gumbel_shift(0.0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(scaling::gumbel_shift(1.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("curvature enters the law as a Gumbel shift") {
  for (int d : {2, 3, 6})
    for (double u : {0.5, 1.0, 4.0, 9.0}) {
      const auto l1 = limit_law_params(d, 1.0);
      const auto lu = limit_law_params(d, u);
      const double kappa = l1.gamma * std::log(u) / 4.0;
      for (int i = 1; i <= d; ++i) {
        const auto g = scaling::gumbel_shift(l1.a[static_cast<std::size_t>(i - 1)],
                                             l1.b_gumbel, kappa);
        CHECK(g.a == Approx(lu.link_a(i)).epsilon(1e-12));
      }
    }
}
