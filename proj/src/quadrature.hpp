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

// Internal quadrature helpers over Boost.Math's Gauss-Kronrod rules.

#ifndef CHAINBREAK_SRC_QUADRATURE_HPP_
#define CHAINBREAK_SRC_QUADRATURE_HPP_

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace chainbreak::detail {

// Adaptive 15-point Gauss-Kronrod on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 30, rel_tol);
}

// Single 15-point Kronrod rule, for smooth integrands over one time step.
// Adaptive refinement is no help there: once the step is short against the
// magnitude of its endpoints, rounding in the nodes dominates the error
// estimate and bisection runs to full depth.
template <class F>
double integrate_fixed(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 0, 0.0);
}

// Integral over [lo, hi] of an integrand that decays (at least
// exponentially) away from hi. Panels of doubling width are added from the
// right until the newest panel is negligible against the running total.
template <class F>
double integrate_decaying(F&& f, double lo, double hi, double rel_tol,
                          double first_width = 1.0) {
  if (!(hi > lo)) return 0.0;
  double total = 0.0;
  double right = hi;
  double width = first_width;
  while (right > lo) {
    const double left = std::max(lo, right - width);
    const double part = integrate(f, left, right, rel_tol);
    total += part;
    if (left <= lo) break;
    if (std::abs(part) <= 1e-17 * std::abs(total) &&
        std::abs(f(left)) <= 1e-16 * std::abs(f(hi)))
      break;
    right = left;
    width *= 2.0;
  }
  return total;
}

}  // namespace chainbreak::detail

#endif  // CHAINBREAK_SRC_QUADRATURE_HPP_
