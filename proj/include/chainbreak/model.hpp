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

#ifndef CHAINBREAK_MODEL_HPP_
#define CHAINBREAK_MODEL_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chainbreak {

inline constexpr double kInfiniteHorizon =
    std::numeric_limits<double>::infinity();

// Physical configuration of a chain of d+1 particles: particle 0 is pinned at
// the origin, particle d is pulled at speed eps, and the chain breaks when a
// gap reaches b_break.
struct ChainParams {
  int d = 3;
  double eps = 1e-3;
  double sigma = 0.05;
  double b_break = 2.0;

  // Throws ParameterError unless d >= 2, b_break > 1, eps >= 0, sigma >= 0.
  void validate() const;
};

// Latest possible break time d(b-1)/eps; kInfiniteHorizon when eps == 0.
double t_star(const ChainParams& params);

// Equilibrium gap 1 + eps t / d.
inline double quasi_static_gap(const ChainParams& params, double t) {
  return 1.0 + params.eps * t / params.d;
}

struct PotentialBounds {
  double kappa_min = 0.0;  // min U'' on [1, b + margin_r]
  double kappa_max = 0.0;  // max U''
  double K = 0.0;          // max |U'''|
  double margin_r = 0.0;
};

enum class PotentialKind { kQuadratic, kCosh, kCustom };

// Pair interaction U, represented through its first three derivatives.
// Immutable; the bounds are attached by validate_potential().
class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential(std::string name, Fn u1, Fn u2, Fn u3);

  double u1(double x) const;
  double u2(double x) const;
  double u3(double x) const;

  const std::string& name() const noexcept { return name_; }
  PotentialKind kind() const noexcept { return kind_; }
  // Curvature of a quadratic potential; zero otherwise.
  double stiffness() const noexcept { return stiffness_; }

  const std::optional<PotentialBounds>& bounds() const noexcept {
    return bounds_;
  }
  // Throws ParameterError when the potential has not been validated.
  const PotentialBounds& checked_bounds() const;
  Potential with_bounds(const PotentialBounds& bounds) const;

 private:
  friend Potential make_quadratic_potential(double u);
  friend Potential make_cosh_potential();

  std::string name_;
  Fn u1_, u2_, u3_;
  PotentialKind kind_ = PotentialKind::kCustom;
  double stiffness_ = 0.0;
  std::optional<PotentialBounds> bounds_;
};

// U(x) = u x^2 / 2.
Potential make_quadratic_potential(double u);
// U(x) = cosh(x - 1).
Potential make_cosh_potential();

// Parses "quadratic:u=<f>" or "cosh".
Potential parse_potential(const std::string& spec);

inline const std::vector<double>& default_margin_candidates() {
  static const std::vector<double> kCandidates{0.5, 0.25, 0.1, 0.05};
  return kCandidates;
}

// Grid-samples U'' and U''' on [1, b_break + r] (spacing <= 1e-3) and returns
// the bounds for the largest candidate r on which U'' stays strictly positive.
PotentialBounds validate_potential(const Potential& p, double b_break,
                                   std::span<const double> r_candidates);

// Convenience: validate and attach the bounds.
Potential validated(const Potential& p, double b_break,
                    std::span<const double> r_candidates =
                        default_margin_candidates());

// Constants of the double-exponential break law for a chain with d links.
struct LimitLawParams {
  int d = 0;
  double v = 0.0;
  double gamma = 0.0;
  std::vector<double> A;  // A[i-1] for link i
  std::vector<double> a;  // a[i-1] for link i
  double a0 = 0.0;
  double b_gumbel = 0.0;
  double u_curv = 0.0;

  // Gumbel location-type parameter for link i (1-based), scaled by sqrt(u).
  double link_a(int link) const;
  double min_a() const;
};

LimitLawParams limit_law_params(int d, double u_curv);

// P(chi <= r) = exp(-a exp(-b r)).
double gumbel_cdf(double r, double a, double b);

// Centered and scaled break time; converges in law to Gumbel(sqrt(u) a0, b)
// for the chain break and to Gumbel(sqrt(u) a_i, b) per link.
// Throws RegimeError when sigma <= eps.
double normalize_break_time(double tau, const ChainParams& params,
                            double u_curv);

// Limit probabilities that link i (index i-1) is the first to break.
std::vector<double> position_limit_probs(int d);

struct BreakEvent {
  double tau = 0.0;
  int link = 0;  // 1..d, 0 when censored
  bool censored = true;
  // First hitting time of b per link (NaN if not observed). Only filled when
  // the simulation tracks all links past the chain break.
  std::vector<double> link_times;
};

}  // namespace chainbreak

#endif  // CHAINBREAK_MODEL_HPP_
