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

#ifndef CHAINBREAK_SCALING_HPP_
#define CHAINBREAK_SCALING_HPP_

namespace chainbreak::scaling {

// Parameters of the standard problem (u = 1, b = 2) whose break times,
// multiplied by time_factor, have the law of the general problem's.
struct StandardProblem {
  double eps_std = 0.0;
  double sigma_std = 0.0;
  double time_factor = 1.0;
};

StandardProblem reduce_to_standard(double u, double b_break, double eps,
                                   double sigma);

struct GeneralProblem {
  double eps = 0.0;
  double sigma = 0.0;
};

// Inverse substitution of reduce_to_standard.
GeneralProblem expand_from_standard(double u, double b_break,
                                    const StandardProblem& standard);

struct GumbelParams {
  double a = 0.0;
  double b = 0.0;
};

// If xi ~ Gumbel(a, b) then xi + kappa ~ Gumbel(a e^{b kappa}, b).
GumbelParams gumbel_shift(double a, double b, double kappa);

}  // namespace chainbreak::scaling

#endif  // CHAINBREAK_SCALING_HPP_
