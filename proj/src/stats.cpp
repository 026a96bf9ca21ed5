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

#include "chainbreak/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "chainbreak/error.hpp"

namespace chainbreak::stats {

Sample::Sample(std::vector<double> values, bool sorted)
    : values_(std::move(values)), sorted_(sorted) {
  if (sorted_ && !std::is_sorted(values_.begin(), values_.end()))
    throw ParameterError("sample flagged as sorted is not nondecreasing");
}

void Sample::sort() {
  if (!sorted_) std::sort(values_.begin(), values_.end());
  sorted_ = true;
}

void Sample::merge(const Sample& other) {
  sort();
  std::vector<double> rhs(other.values_.begin(), other.values_.end());
  if (!other.sorted_) std::sort(rhs.begin(), rhs.end());
  std::vector<double> out;
  out.reserve(values_.size() + rhs.size());
  std::merge(values_.begin(), values_.end(), rhs.begin(), rhs.end(),
             std::back_inserter(out));
  values_ = std::move(out);
}

double ks_distance(const Sample& sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ParameterError("KS distance of an empty sample");
  Sample s = sample;
  s.sort();
  const auto xs = s.values();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    const double hi = static_cast<double>(i + 1) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max({d, std::abs(hi - f), std::abs(lo - f)});
  }
  return d;
}

double ks_two_sample(const Sample& a, const Sample& b) {
  if (a.empty() || b.empty())
    throw ParameterError("KS distance of an empty sample");
  Sample sa = a, sb = b;
  sa.sort();
  sb.sort();
  const auto xa = sa.values(), xb = sb.values();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) throw ParameterError("empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double position_chisq(std::span<const std::int64_t> counts,
                      std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.empty())
    throw ParameterError("counts and probabilities differ in length");
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw ParameterError("negative count");
    total += c;
  }
  if (total < 1) throw ParameterError("position chi-square needs N >= 1");
  double psum = 0.0;
  for (double p : probs) psum += p;
  if (std::abs(psum - 1.0) > 1e-9)
    throw ParameterError("probabilities must sum to 1");
  double chi = 0.0;
  const double n = static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = n * probs[i];
    if (!(expected > 0.0)) throw ParameterError("zero expected count");
    const double diff = static_cast<double>(counts[i]) - expected;
    chi += diff * diff / expected;
  }
  return chi;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ParameterError("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw ParameterError("variance needs two values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double variance_standard_error(double var, std::size_t n) {
  if (n < 2) throw ParameterError("standard error needs two values");
  return var * std::sqrt(2.0 / static_cast<double>(n - 1));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::seed_seq make_seed_seq(std::uint64_t master, std::uint64_t index) {
  const std::uint64_t a = splitmix64(master);
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  const std::uint64_t c = splitmix64(b);
  return std::seed_seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t path_index) {
  auto seq = make_seed_seq(master_seed, path_index);
  engine_.seed(seq);
}

RandomStream seed_stream(std::uint64_t master_seed, std::uint64_t path_index) {
  return RandomStream(master_seed, path_index);
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers < 1) throw ParameterError("workers must be >= 1");
  const auto nthreads =
      static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(nthreads);
  for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace chainbreak::stats
