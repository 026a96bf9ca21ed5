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

#include "chainbreak/spectral.hpp"

#include <cmath>
#include <numbers>

#include "chainbreak/error.hpp"
#include "quadrature.hpp"

namespace chainbreak {

Eigen::MatrixXd build_laplacian(int d) {
  if (d < 2) throw ParameterError("d must be at least 2");
  const int n = d - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = -2.0;
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = 1.0;
  }
  return a;
}

Spectrum eigendecompose(int d) {
  if (d < 2) throw ParameterError("d must be at least 2");
  Spectrum s;
  s.dim = d - 1;
  s.lambdas.resize(static_cast<std::size_t>(s.dim));
  s.q.resize(s.dim, s.dim);
  const double norm = std::sqrt(2.0 / d);
  for (int j = 1; j <= s.dim; ++j) {
    s.lambdas[static_cast<std::size_t>(j - 1)] =
        -2.0 * (1.0 - std::cos(j * std::numbers::pi / d));
    for (int k = 1; k <= s.dim; ++k)
      s.q(j - 1, k - 1) = norm * std::sin(j * k * std::numbers::pi / d);
  }
  return s;
}

void check_time_domain(const ChainParams& params, double t) {
  const double ts = t_star(params);
  const double slack = std::isfinite(ts) ? 1e-12 * ts : 0.0;
  if (!(t >= 0.0) || t > ts + slack)
    throw DomainError("time " + std::to_string(t) + " outside [0, t*]");
}

double stiffness_integral(const Potential& p, const ChainParams& params,
                               double t1, double t2) {
  if (!(t2 > t1)) return 0.0;
  if (params.eps == 0.0) return p.u2(1.0) * (t2 - t1);
  switch (p.kind()) {
    case PotentialKind::kQuadratic:
      return p.stiffness() * (t2 - t1);
    case PotentialKind::kCosh: {
      // (d/eps)(sinh(c t2) - sinh(c t1)) = (2d/eps) cosh(c(t1+t2)/2) sinh(c(t2-t1)/2)
      const double c = params.eps / params.d;
      return 2.0 / c * std::cosh(0.5 * c * (t1 + t2)) *
             std::sinh(0.5 * c * (t2 - t1));
    }
    case PotentialKind::kCustom:
      break;
  }
  return detail::integrate(
      [&](double s) { return stiffness_at(p, params, s); }, t1, t2, 1e-12);
}

double phi_increment(const Potential& p, const ChainParams& params, double t1,
                     double t2) {
  check_time_domain(params, t1);
  check_time_domain(params, t2);
  if (t2 < t1) throw DomainError("phi_increment needs t1 <= t2");
  return stiffness_integral(p, params, t1, t2);
}

double phi_integral(const Potential& p, const ChainParams& params, double t) {
  return phi_increment(p, params, 0.0, t);
}

Eigen::VectorXd pulling_profile(int d) {
  Eigen::VectorXd nu(d - 1);
  for (int j = 1; j < d; ++j) nu(j - 1) = static_cast<double>(j) / d;
  return nu;
}

Eigen::VectorXd drift_g(const Potential& p, const ChainParams& params,
                        const Spectrum& spectrum, double t) {
  check_time_domain(params, t);
  if (spectrum.dim != params.d - 1)
    throw ParameterError("spectrum dimension does not match the chain");
  const Eigen::VectorXd q_nu = spectrum.q * pulling_profile(params.d);
  Eigen::VectorXd modes(spectrum.dim);
  for (int j = 0; j < spectrum.dim; ++j) {
    const double lambda = spectrum.lambdas[static_cast<std::size_t>(j)];
    const double integral = detail::integrate_decaying(
        [&](double s) {
          return std::exp(lambda * stiffness_integral(p, params, s, t));
        },
        0.0, t, 1e-10);
    modes(j) = -integral * q_nu(j);
  }
  return spectrum.q.transpose() * modes;
}

}  // namespace chainbreak
