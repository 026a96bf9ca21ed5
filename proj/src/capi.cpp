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

#include "chainbreak/chainbreak.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "chainbreak/error.hpp"
#include "chainbreak/experiment.hpp"
#include "chainbreak/model.hpp"
#include "chainbreak/scaling.hpp"

struct cb_config {
  chainbreak::ExperimentConfig value;
};

struct cb_report {
  chainbreak::ExperimentReport value;
};

struct cb_sweep {
  std::vector<cb_report> reports;
};

namespace {

thread_local std::string g_last_error;

cb_status fail(cb_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
cb_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return CB_OK;
  } catch (const chainbreak::Error& e) {
    return fail(static_cast<cb_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CB_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const chainbreak::PathRow& row_at(const cb_report* r, int64_t index) {
  if (index < 0 || static_cast<std::size_t>(index) >= r->value.rows.size())
    throw chainbreak::ParameterError("row index out of range");
  return r->value.rows[static_cast<std::size_t>(index)];
}

void copy_label(char (&dst)[16], const std::string& src) {
  std::strncpy(dst, src.c_str(), sizeof dst - 1);
  dst[sizeof dst - 1] = '\0';
}

}  // namespace

#define CB_REQUIRE(ptr)                                              \
  do {                                                               \
    if ((ptr) == nullptr)                                            \
      return fail(CB_ERR_NULL_ARGUMENT, #ptr " must not be NULL");   \
  } while (0)

extern "C" {

const char* cb_last_error(void) { return g_last_error.c_str(); }

const char* cb_version(void) { return "0.1.0"; }

void cb_string_free(char* s) { delete[] s; }

cb_status cb_config_new(cb_config** out) {
  CB_REQUIRE(out);
  return guarded([&] { *out = new cb_config{}; });
}

cb_status cb_config_from_file(const char* path, cb_config** out) {
  CB_REQUIRE(path);
  CB_REQUIRE(out);
  return guarded([&] {
    *out = new cb_config{chainbreak::load_config_file(path)};
  });
}

cb_status cb_config_from_string(const char* toml, cb_config** out) {
  CB_REQUIRE(toml);
  CB_REQUIRE(out);
  return guarded([&] { *out = new cb_config{chainbreak::parse_config(toml)}; });
}

cb_status cb_config_law_recipe(const char* name, cb_config** out) {
  CB_REQUIRE(name);
  CB_REQUIRE(out);
  return guarded([&] { *out = new cb_config{chainbreak::law_recipe(name)}; });
}

cb_status cb_config_clone(const cb_config* config, cb_config** out) {
  CB_REQUIRE(config);
  CB_REQUIRE(out);
  return guarded([&] { *out = new cb_config{config->value}; });
}

cb_status cb_config_set(cb_config* config, const char* key,
                        const char* value) {
  CB_REQUIRE(config);
  CB_REQUIRE(key);
  CB_REQUIRE(value);
  return guarded([&] { chainbreak::set_key(config->value, key, value); });
}

cb_status cb_config_apply(cb_config* config, const char* assignment) {
  CB_REQUIRE(config);
  CB_REQUIRE(assignment);
  return guarded(
      [&] { chainbreak::apply_override(config->value, assignment); });
}

cb_status cb_config_use_law_thresholds(cb_config* config) {
  CB_REQUIRE(config);
  return guarded([&] {
    config->value = chainbreak::with_law_thresholds(config->value);
  });
}

cb_status cb_config_validate(const cb_config* config) {
  CB_REQUIRE(config);
  return guarded([&] { config->value.validate(); });
}

void cb_config_free(cb_config* config) { delete config; }

cb_status cb_run(const cb_config* config, cb_report** out) {
  CB_REQUIRE(config);
  CB_REQUIRE(out);
  return guarded([&] {
    auto report =
        std::make_unique<cb_report>(chainbreak::run_experiment(config->value));
    chainbreak::write_outputs(config->value, report->value);
    *out = report.release();
  });
}

void cb_report_free(cb_report* report) { delete report; }

cb_status cb_report_row_count(const cb_report* report, int64_t* out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  *out = static_cast<int64_t>(report->value.rows.size());
  return CB_OK;
}

cb_status cb_report_row(const cb_report* report, int64_t index, cb_row* out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  return guarded([&] {
    const auto& r = row_at(report, index);
    *out = cb_row{r.path_index, r.tau, r.link, r.censored ? 1 : 0,
                  r.normalized_tau};
  });
}

cb_status cb_report_link_time(const cb_report* report, int64_t index,
                              int32_t link, double* out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  return guarded([&] {
    (void)row_at(report, index);
    const auto& lt = report->value.link_times[static_cast<std::size_t>(index)];
    if (link < 1 || static_cast<std::size_t>(link) > lt.size())
      throw chainbreak::ParameterError("link out of range");
    *out = lt[static_cast<std::size_t>(link - 1)];
  });
}

cb_status cb_report_s_star(const cb_report* report, int64_t index,
                           double* out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  return guarded([&] {
    (void)row_at(report, index);
    const auto& s = report->value.s_star;
    if (s.empty())
      throw chainbreak::ParameterError("S* is only recorded for coupled runs");
    *out = s[static_cast<std::size_t>(index)];
  });
}

cb_status cb_report_passed(const cb_report* report, int* out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  *out = report->value.summary.passed ? 1 : 0;
  return CB_OK;
}

cb_status cb_report_summary_json(const cb_report* report, char** out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  return guarded([&] {
    *out = dup_string(chainbreak::summary_json(report->value.summary));
  });
}

cb_status cb_report_csv(const cb_report* report, char** out) {
  CB_REQUIRE(report);
  CB_REQUIRE(out);
  return guarded(
      [&] { *out = dup_string(chainbreak::rows_csv(report->value)); });
}

cb_status cb_report_write(const cb_report* report, const char* csv_path,
                          const char* json_path) {
  CB_REQUIRE(report);
  return guarded([&] {
    if (csv_path && *csv_path)
      chainbreak::write_text_file(csv_path, chainbreak::rows_csv(report->value));
    if (json_path && *json_path)
      chainbreak::write_text_file(
          json_path, chainbreak::summary_json(report->value.summary) + "\n");
  });
}

cb_status cb_sweep_run(const cb_config* config, const char* axis,
                       const double* values, size_t count, cb_sweep** out) {
  CB_REQUIRE(config);
  CB_REQUIRE(axis);
  CB_REQUIRE(out);
  if (count > 0 && values == nullptr)
    return fail(CB_ERR_NULL_ARGUMENT, "values must not be NULL");
  return guarded([&] {
    const auto reports =
        chainbreak::sweep(config->value, chainbreak::parse_sweep_axis(axis),
                          std::vector<double>(values, values + count));
    auto result = std::make_unique<cb_sweep>();
    for (const auto& r : reports) result->reports.push_back(cb_report{r});
    *out = result.release();
  });
}

size_t cb_sweep_size(const cb_sweep* sweep) {
  return sweep ? sweep->reports.size() : 0;
}

const cb_report* cb_sweep_report(const cb_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->reports.size()) return nullptr;
  return &sweep->reports[index];
}

void cb_sweep_free(cb_sweep* sweep) { delete sweep; }

cb_status cb_verify_scaling(const cb_config* config, double ks_max,
                            char** json_out, int* passed) {
  CB_REQUIRE(config);
  return guarded([&] {
    const auto check = chainbreak::verify_scaling(config->value, ks_max);
    if (passed) *passed = check.passed ? 1 : 0;
    if (json_out) *json_out = dup_string(check.to_json());
  });
}

cb_status cb_oracle_table(const cb_config* config, const double* times,
                          size_t count, char** csv_out) {
  CB_REQUIRE(config);
  CB_REQUIRE(csv_out);
  return guarded([&] {
    std::vector<double> ts;
    if (times) ts.assign(times, times + count);
    *csv_out = dup_string(chainbreak::oracle_table_csv(config->value, ts));
  });
}

cb_status cb_check_regime(double eps, double sigma, cb_regime* out) {
  CB_REQUIRE(out);
  return guarded([&] {
    chainbreak::ChainParams params;
    params.eps = eps;
    params.sigma = sigma;
    const auto r = chainbreak::check_regime(params);
    out->ratio = r.ratio;
    out->vanish3 = r.vanish3;
    out->vanish15 = r.vanish15;
    out->vanish1 = r.vanish1;
    copy_label(out->nonlinear, r.nonlinear);
    copy_label(out->linear_timevarying, r.linear_timevarying);
    copy_label(out->linear_constant, r.linear_constant);
  });
}

cb_status cb_t_star(int32_t d, double eps, double b_break, double* out) {
  CB_REQUIRE(out);
  return guarded([&] {
    chainbreak::ChainParams params{d, eps, 0.0, b_break};
    params.validate();
    *out = chainbreak::t_star(params);
  });
}

cb_status cb_normalize_break_time(double tau, int32_t d, double eps,
                                  double sigma, double b_break, double u_curv,
                                  double* out) {
  CB_REQUIRE(out);
  return guarded([&] {
    chainbreak::ChainParams params{d, eps, sigma, b_break};
    params.validate();
    *out = chainbreak::normalize_break_time(tau, params, u_curv);
  });
}

cb_status cb_limit_law(int32_t d, double u_curv, int32_t link,
                       cb_gumbel* out) {
  CB_REQUIRE(out);
  return guarded([&] {
    const auto law = chainbreak::limit_law_params(d, u_curv);
    out->a = link == 0 ? law.min_a() : law.link_a(link);
    out->b = law.b_gumbel;
  });
}

double cb_gumbel_cdf(double r, double a, double b) {
  try {
    return chainbreak::gumbel_cdf(r, a, b);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return std::nan("");
  }
}

cb_status cb_position_probs(int32_t d, double* out) {
  CB_REQUIRE(out);
  return guarded([&] {
    const auto probs = chainbreak::position_limit_probs(d);
    std::copy(probs.begin(), probs.end(), out);
  });
}

cb_status cb_reduce_to_standard(double u, double b_break, double eps,
                                double sigma, double* eps_std,
                                double* sigma_std, double* time_factor) {
  CB_REQUIRE(eps_std);
  CB_REQUIRE(sigma_std);
  CB_REQUIRE(time_factor);
  return guarded([&] {
    const auto s = chainbreak::scaling::reduce_to_standard(u, b_break, eps, sigma);
    *eps_std = s.eps_std;
    *sigma_std = s.sigma_std;
    *time_factor = s.time_factor;
  });
}

}  // extern "C"
