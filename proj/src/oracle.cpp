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

#include "chainbreak/oracle.hpp"

#include <cmath>

#include "chainbreak/error.hpp"
#include "chainbreak/spectral.hpp"
#include "quadrature.hpp"

namespace chainbreak::oracle {

namespace {

constexpr double kRelTol = 1e-10;

void check_rate(double u) {
  if (!(u > 0.0)) throw ParameterError("OU rate must be > 0");
}

// sigma^2 * int_lo^hi exp(-c (Phi(hi) - Phi(s)) - e (hi - s)) ds
double decaying_moment(const Potential& p, const ChainParams& params,
                       double lo, double hi, double c, double e,
                       double sigma) {
  const double integral = detail::integrate_decaying(
      [&](double s) {
        return std::exp(-c * phi_increment(p, params, s, hi) - e * (hi - s));
      },
      lo, hi, kRelTol);
  return sigma * sigma * integral;
}

}  // namespace

double ou_variance(double u, double sigma, double t) {
  check_rate(u);
  if (t < 0.0) throw DomainError("time must be >= 0");
  return sigma * sigma * -std::expm1(-2.0 * u * t) / (2.0 * u);
}

double ou_covariance(double u, double sigma, double t1, double t2) {
  check_rate(u);
  if (t1 < 0.0 || t2 < 0.0) throw DomainError("times must be >= 0");
  return sigma * sigma / (2.0 * u) *
         (std::exp(-u * std::abs(t1 - t2)) - std::exp(-u * (t1 + t2)));
}

double z_variance(const Potential& p, const ChainParams& params, double t,
                  double rate_scale) {
  check_time_domain(params, t);
  return decaying_moment(p, params, 0.0, t, 2.0 * rate_scale, 0.0,
                         params.sigma);
}

double yz_covariance(const Potential& p, const ChainParams& params, double u,
                     double t, double rate_scale) {
  check_rate(u);
  check_time_domain(params, t);
  return decaying_moment(p, params, 0.0, t, rate_scale, rate_scale * u,
                         params.sigma);
}

double yz_distance_sq(const Potential& p, const ChainParams& params, double u,
                      double t, double rate_scale) {
  return ou_variance(rate_scale * u, params.sigma, t) +
         z_variance(p, params, t, rate_scale) -
         2.0 * yz_covariance(p, params, u, t, rate_scale);
}

double increment_msq(const Potential& p, const ChainParams& params, double t1,
                     double t2, double rate_scale) {
  check_time_domain(params, t1);
  check_time_domain(params, t2);
  if (t2 < t1) throw DomainError("increment_msq needs t1 <= t2");
  if (t2 - t1 > 1.0) throw DomainError("increment_msq needs t2 - t1 <= 1");
  // sigma^2 (e^{-(Phi2-Phi1)} - 1)^2 int_0^t1 e^{2(Phi_s - Phi1)} ds
  //   + sigma^2 int_t1^t2 e^{2(Phi_s - Phi2)} ds
  const double decay =
      std::expm1(-rate_scale * phi_increment(p, params, t1, t2));
  const double old_part =
      decaying_moment(p, params, 0.0, t1, 2.0 * rate_scale, 0.0, params.sigma);
  const double new_part =
      decaying_moment(p, params, t1, t2, 2.0 * rate_scale, 0.0, params.sigma);
  return decay * decay * old_part + new_part;
}

double hoelder_constant(const PotentialBounds& bounds) {
  return bounds.kappa_max * bounds.kappa_max / (2.0 * bounds.kappa_min) + 1.0;
}

double variance(const ScalarProcessSpec& spec, const Potential& p,
                const ChainParams& params, double t) {
  switch (spec.kind) {
    case ScalarKind::kConstantRate:
      return ou_variance(spec.rate_scale * spec.u, spec.sigma, t);
    case ScalarKind::kTimeVarying: {
      ChainParams with_sigma = params;
      with_sigma.sigma = spec.sigma;
      return z_variance(p, with_sigma, t, spec.rate_scale);
    }
  }
  throw ParameterError("unknown scalar process kind");
}

}  // namespace chainbreak::oracle
