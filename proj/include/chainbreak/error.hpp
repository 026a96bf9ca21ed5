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

#ifndef CHAINBREAK_ERROR_HPP_
#define CHAINBREAK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace chainbreak {

// Mirrors cb_status in chainbreak.h; the numeric values are part of the C ABI.
enum class ErrorCode : int {
  kParameter = 1,
  kAssumptionViolation = 2,
  kDomain = 3,
  kDomainEscape = 4,
  kRegime = 5,
  kConfig = 6,
  kIo = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorCode::kParameter, what) {}
};

class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& what, double x)
      : Error(ErrorCode::kAssumptionViolation, what), x_(x) {}
  // Grid point at which the assumption failed.
  double point() const noexcept { return x_; }

 private:
  double x_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::kDomain, what) {}
};

// A nonlinear path left the interval on which the potential bounds hold.
class DomainEscape : public Error {
 public:
  DomainEscape(double t, int link, double gap)
      : Error(ErrorCode::kDomainEscape,
              "gap " + std::to_string(gap) + " on link " +
                  std::to_string(link) + " left the validated domain at t=" +
                  std::to_string(t)),
        t_(t),
        link_(link),
        gap_(gap) {}
  double time() const noexcept { return t_; }
  int link() const noexcept { return link_; }
  double gap() const noexcept { return gap_; }

 private:
  double t_;
  int link_;
  double gap_;
};

class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what)
      : Error(ErrorCode::kRegime, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace chainbreak

#endif  // CHAINBREAK_ERROR_HPP_
