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

#ifndef CHAINBREAK_ORACLE_HPP_
#define CHAINBREAK_ORACLE_HPP_

#include "chainbreak/model.hpp"

namespace chainbreak::oracle {

// Second moments of the scalar Gaussian processes
//   dY = -u Y dt + sigma dB               (constant rate)
//   dZ = -s phi(t) Z dt + sigma dB        (time-varying, phi = U''(q_t))
// started at zero. `rate_scale` s is 1 for the scalar convention and
// -lambda_j for eigenmode j of the chain.

double ou_variance(double u, double sigma, double t);
double ou_covariance(double u, double sigma, double t1, double t2);

double z_variance(const Potential& p, const ChainParams& params, double t,
                  double rate_scale = 1.0);

// Cov(Y_t, Z_t) for Y with rate u and Z as above.
double yz_covariance(const Potential& p, const ChainParams& params, double u,
                     double t, double rate_scale = 1.0);

// E[(Y_t - Z_t)^2] = Var Y + Var Z - 2 Cov.
double yz_distance_sq(const Potential& p, const ChainParams& params, double u,
                      double t, double rate_scale = 1.0);

// E[(Z_t2 - Z_t1)^2] for 0 <= t1 <= t2 <= t*, t2 - t1 <= 1.
double increment_msq(const Potential& p, const ChainParams& params, double t1,
                     double t2, double rate_scale = 1.0);

// C in E[(Z_t2 - Z_t1)^2] <= C sigma^2 (t2 - t1).
double hoelder_constant(const PotentialBounds& bounds);

enum class ScalarKind { kConstantRate, kTimeVarying };

struct ScalarProcessSpec {
  ScalarKind kind = ScalarKind::kConstantRate;
  double sigma = 0.0;
  double rate_scale = 1.0;
  double u = 1.0;  // rate for kConstantRate
};

double variance(const ScalarProcessSpec& spec, const Potential& p,
                const ChainParams& params, double t);

}  // namespace chainbreak::oracle

#endif  // CHAINBREAK_ORACLE_HPP_
