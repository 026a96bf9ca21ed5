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

#include "chainbreak/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chainbreak/error.hpp"

namespace chainbreak {

void ChainParams::validate() const {
  if (d < 2) throw ParameterError("d must be at least 2");
  if (!(b_break > 1.0) || !std::isfinite(b_break))
    throw ParameterError("b_break must be a finite value > 1");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw ParameterError("eps must be finite and >= 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ParameterError("sigma must be finite and >= 0");
}

double t_star(const ChainParams& params) {
  if (params.eps == 0.0) return kInfiniteHorizon;
  return params.d * (params.b_break - 1.0) / params.eps;
}

Potential::Potential(std::string name, Fn u1, Fn u2, Fn u3)
    : name_(std::move(name)),
      u1_(std::move(u1)),
      u2_(std::move(u2)),
      u3_(std::move(u3)) {
  if (!u1_ || !u2_ || !u3_)
    throw ParameterError("potential derivatives must be callable");
}

// The built-in kinds bypass std::function on the hot path.
double Potential::u1(double x) const {
  switch (kind_) {
    case PotentialKind::kQuadratic:
      return stiffness_ * x;
    case PotentialKind::kCosh:
      return std::sinh(x - 1.0);
    case PotentialKind::kCustom:
      break;
  }
  return u1_(x);
}

double Potential::u2(double x) const {
  switch (kind_) {
    case PotentialKind::kQuadratic:
      return stiffness_;
    case PotentialKind::kCosh:
      return std::cosh(x - 1.0);
    case PotentialKind::kCustom:
      break;
  }
  return u2_(x);
}

double Potential::u3(double x) const {
  switch (kind_) {
    case PotentialKind::kQuadratic:
      return 0.0;
    case PotentialKind::kCosh:
      return std::sinh(x - 1.0);
    case PotentialKind::kCustom:
      break;
  }
  return u3_(x);
}

const PotentialBounds& Potential::checked_bounds() const {
  if (!bounds_)
    throw ParameterError("potential '" + name_ +
                         "' has not been validated (no bounds attached)");
  return *bounds_;
}

Potential Potential::with_bounds(const PotentialBounds& bounds) const {
  Potential copy = *this;
  copy.bounds_ = bounds;
  return copy;
}

Potential make_quadratic_potential(double u) {
  if (!(u > 0.0) || !std::isfinite(u))
    throw ParameterError("quadratic potential needs u > 0");
  Potential p(
      "quadratic:u=" + [&] {
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os.precision(17);
        os << u;
        return os.str();
      }(),
      [u](double x) { return u * x; }, [u](double) { return u; },
      [](double) { return 0.0; });
  p.kind_ = PotentialKind::kQuadratic;
  p.stiffness_ = u;
  return p;
}

Potential make_cosh_potential() {
  Potential p(
      "cosh", [](double x) { return std::sinh(x - 1.0); },
      [](double x) { return std::cosh(x - 1.0); },
      [](double x) { return std::sinh(x - 1.0); });
  p.kind_ = PotentialKind::kCosh;
  return p;
}

Potential parse_potential(const std::string& spec) {
  if (spec == "cosh") return make_cosh_potential();
  const std::string prefix = "quadratic:u=";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string num = spec.substr(prefix.size());
    double u = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), u);
    if (ec != std::errc() || ptr != num.data() + num.size())
      throw ParameterError("bad quadratic stiffness in potential '" + spec +
                           "'");
    return make_quadratic_potential(u);
  }
  throw ParameterError("unknown potential '" + spec +
                       "' (expected \"quadratic:u=<f>\" or \"cosh\")");
}

PotentialBounds validate_potential(const Potential& p, double b_break,
                                   std::span<const double> r_candidates) {
  if (!(b_break > 1.0)) throw ParameterError("b_break must be > 1");
  if (r_candidates.empty())
    throw ParameterError("at least one margin candidate is required");
  std::vector<double> rs(r_candidates.begin(), r_candidates.end());
  for (double r : rs)
    if (!(r > 0.0)) throw ParameterError("margin candidates must be positive");
  std::sort(rs.begin(), rs.end(), std::greater<>());

  constexpr double kMaxSpacing = 1e-3;
  double offending = std::numeric_limits<double>::quiet_NaN();
  for (double r : rs) {
    const double hi = b_break + r;
    const auto n = static_cast<long>(std::ceil((hi - 1.0) / kMaxSpacing));
    const double h = (hi - 1.0) / static_cast<double>(n);
    PotentialBounds bounds{std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(), 0.0, r};
    bool ok = true;
    for (long k = 0; k <= n; ++k) {
      const double x = (k == n) ? hi : 1.0 + static_cast<double>(k) * h;
      const double c = p.u2(x);
      const double k3 = p.u3(x);
      if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(k3)) {
        ok = false;
        offending = x;
        break;
      }
      bounds.kappa_min = std::min(bounds.kappa_min, c);
      bounds.kappa_max = std::max(bounds.kappa_max, c);
      bounds.K = std::max(bounds.K, std::abs(k3));
    }
    if (ok) return bounds;
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "potential '" << p.name()
     << "' violates strict convexity: U'' <= 0 (or non-finite) at x = "
     << offending;
  throw AssumptionViolation(os.str(), offending);
}

Potential validated(const Potential& p, double b_break,
                    std::span<const double> r_candidates) {
  return p.with_bounds(validate_potential(p, b_break, r_candidates));
}

double LimitLawParams::link_a(int link) const {
  if (link < 1 || link > d) throw ParameterError("link index out of range");
  return std::sqrt(u_curv) * a[static_cast<std::size_t>(link - 1)];
}

double LimitLawParams::min_a() const { return std::sqrt(u_curv) * a0; }

LimitLawParams limit_law_params(int d, double u_curv) {
  if (d < 2) throw ParameterError("d must be at least 2");
  if (!(u_curv > 0.0)) throw ParameterError("u_curv must be > 0");
  LimitLawParams lp;
  lp.d = d;
  lp.u_curv = u_curv;
  const double dd = d;
  lp.v = std::sqrt((dd - 1.0) / (2.0 * dd));
  lp.gamma = std::sqrt(dd * (dd - 1.0));
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  lp.A.assign(static_cast<std::size_t>(d), 2.0 * dd / (dd - 1.0));
  lp.A.front() = lp.A.back() = dd / (dd - 1.0);
  lp.a.resize(lp.A.size());
  lp.a0 = 0.0;
  for (std::size_t i = 0; i < lp.A.size(); ++i) {
    lp.a[i] = lp.v * dd * lp.A[i] * inv_sqrt_2pi;
    lp.a0 += lp.a[i];
  }
  lp.b_gumbel = std::numbers::sqrt2 / (lp.v * dd);
  return lp;
}

double gumbel_cdf(double r, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ParameterError("Gumbel parameters must be positive");
  return std::exp(-a * std::exp(-b * r));
}

double normalize_break_time(double tau, const ChainParams& params,
                            double u_curv) {
  if (!(params.eps > 0.0))
    throw RegimeError("normalized break time needs eps > 0");
  if (!(params.sigma > params.eps))
    throw RegimeError("normalized break time needs sigma > eps");
  if (!(u_curv > 0.0)) throw ParameterError("u_curv must be > 0");
  const double gamma =
      std::sqrt(static_cast<double>(params.d) * (params.d - 1.0));
  const double root_log = std::sqrt(std::log(params.sigma / params.eps));
  const double su = std::sqrt(u_curv);
  const double scale = su * params.eps / params.sigma * root_log;
  const double center =
      t_star(params) - gamma * params.sigma / (su * params.eps) * root_log;
  return scale * (center - tau);
}

std::vector<double> position_limit_probs(int d) {
  if (d < 2) throw ParameterError("d must be at least 2");
  std::vector<double> probs(static_cast<std::size_t>(d), 1.0 / (d - 1.0));
  probs.front() = probs.back() = 1.0 / (2.0 * (d - 1.0));
  return probs;
}

}  // namespace chainbreak
