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

#include "chainbreak/scaling.hpp"

#include <cmath>

#include "chainbreak/error.hpp"

namespace chainbreak::scaling {

StandardProblem reduce_to_standard(double u, double b_break, double eps,
                                   double sigma) {
  if (!(u > 0.0)) throw ParameterError("u must be > 0");
  if (!(b_break > 1.0)) throw ParameterError("b_break must be > 1");
  if (!(eps > 0.0)) throw ParameterError("eps must be > 0");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  const double stretch = b_break - 1.0;
  return {eps / (u * stretch), sigma / (std::sqrt(u) * stretch), 1.0 / u};
}

GeneralProblem expand_from_standard(double u, double b_break,
                                    const StandardProblem& standard) {
  if (!(u > 0.0)) throw ParameterError("u must be > 0");
  if (!(b_break > 1.0)) throw ParameterError("b_break must be > 1");
  const double stretch = b_break - 1.0;
  return {standard.eps_std * u * stretch,
          standard.sigma_std * std::sqrt(u) * stretch};
}

GumbelParams gumbel_shift(double a, double b, double kappa) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ParameterError("Gumbel parameters must be positive");
  return {a * std::exp(b * kappa), b};
}

}  // namespace chainbreak::scaling
