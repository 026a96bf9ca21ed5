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

#ifndef CHAINBREAK_SPECTRAL_HPP_
#define CHAINBREAK_SPECTRAL_HPP_

#include <Eigen/Dense>
#include <vector>

#include "chainbreak/model.hpp"

namespace chainbreak {

// (d-1)x(d-1) Dirichlet discrete Laplacian: -2 on the diagonal, +1 on the
// first off-diagonals.
Eigen::MatrixXd build_laplacian(int d);

// A = Q^T diag(lambdas) Q with orthogonal Q whose rows are eigenvectors.
struct Spectrum {
  int dim = 0;
  std::vector<double> lambdas;  // lambda_j = -2(1 - cos(j pi / d)), j = 1..d-1
  Eigen::MatrixXd q;

  // Spectral gap min_j |lambda_j| = |lambda_1|.
  double mu() const { return -lambdas.front(); }
};

Spectrum eigendecompose(int d);

// Stiffness phi(t) = U''(1 + eps t / d) of the linearized chain.
inline double stiffness_at(const Potential& p, const ChainParams& params,
                           double t) {
  return p.u2(quasi_static_gap(params, t));
}

// Phi(t) = integral of phi over [0, t]; closed forms for the built-in
// potentials, adaptive quadrature (rel. 1e-10) otherwise.
double phi_integral(const Potential& p, const ChainParams& params, double t);

// Phi(t2) - Phi(t1) for t1 <= t2, evaluated without cancellation.
double phi_increment(const Potential& p, const ChainParams& params, double t1,
                     double t2);

// phi_increment without the [0, t*] domain check (used past t* by simulators
// that keep tracking links after the chain break).
double stiffness_integral(const Potential& p, const ChainParams& params,
                          double t1, double t2);

// Deterministic part g_t of the linearized chain (interior components 1..d-1).
// Computed per eigenmode by quadrature and rotated back.
Eigen::VectorXd drift_g(const Potential& p, const ChainParams& params,
                        const Spectrum& spectrum, double t);

// nu_j = j / d, j = 1..d-1.
Eigen::VectorXd pulling_profile(int d);

// Throws DomainError unless 0 <= t <= t* (t* infinite when eps == 0).
void check_time_domain(const ChainParams& params, double t);

}  // namespace chainbreak

#endif  // CHAINBREAK_SPECTRAL_HPP_
