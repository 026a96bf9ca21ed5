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

#ifndef CHAINBREAK_STATS_HPP_
#define CHAINBREAK_STATS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace chainbreak::stats {

class Sample {
 public:
  Sample() = default;
  explicit Sample(std::vector<double> values, bool sorted = false);

  void sort();
  bool sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  // Sorted-insertion merge; the result does not depend on merge order.
  void merge(const Sample& other);

 private:
  std::vector<double> values_;
  bool sorted_ = false;
};

// sup_x |F_n(x) - F(x)| evaluated at the sample points.
double ks_distance(const Sample& sample,
                   const std::function<double(double)>& cdf);

// Two-sample statistic sup_x |F_n(x) - G_m(x)|.
double ks_two_sample(const Sample& a, const Sample& b);

// Asymptotic two-sample critical value c(alpha) sqrt((n+m)/(n m)).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

// Pearson statistic sum (c_i - N p_i)^2 / (N p_i).
double position_chisq(std::span<const std::int64_t> counts,
                      std::span<const double> probs);

double mean(std::span<const double> xs);
// Unbiased sample variance.
double variance(std::span<const double> xs);
// Standard error of the unbiased sample variance for a Gaussian population,
// var * sqrt(2 / (n - 1)).
double variance_standard_error(double var, std::size_t n);

// Per-path random stream. The generator state is a pure function of
// (master_seed, path_index), so runs are reproducible for any worker count.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t path_index);

  double normal() { return normal_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

RandomStream seed_stream(std::uint64_t master_seed, std::uint64_t path_index);

std::uint64_t splitmix64(std::uint64_t x);

// Runs body(i) for i in [0, n) on `workers` threads. The first exception
// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body);

// FNV-1a 64 over raw bytes, chainable through `seed`.
std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace chainbreak::stats

#endif  // CHAINBREAK_STATS_HPP_
