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

#ifndef CHAINBREAK_CHAINBREAK_H_
#define CHAINBREAK_CHAINBREAK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CHAINBREAK_BUILDING)
#define CB_API __declspec(dllexport)
#else
#define CB_API __declspec(dllimport)
#endif
#else
#define CB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_PARAMETER = 1,
  CB_ERR_ASSUMPTION = 2,
  CB_ERR_DOMAIN = 3,
  CB_ERR_DOMAIN_ESCAPE = 4,
  CB_ERR_REGIME = 5,
  CB_ERR_CONFIG = 6,
  CB_ERR_IO = 7,
  CB_ERR_NULL_ARGUMENT = 8,
  CB_ERR_INTERNAL = 99
} cb_status;

typedef struct cb_config cb_config;
typedef struct cb_report cb_report;
typedef struct cb_sweep cb_sweep;

typedef struct cb_row {
  int64_t path_index;
  double tau;
  int32_t link; /* 1..d, 0 when censored */
  int32_t censored;
  double normalized_tau; /* NaN when undefined */
} cb_row;

typedef struct cb_regime {
  double ratio;    /* sigma / eps */
  double vanish3;  /* sigma^2 |ln eps|^3 */
  double vanish15; /* sigma^2 |ln eps|^(3/2) */
  double vanish1;  /* sigma^2 |ln eps| */
  char nonlinear[16]; /* "comfortable", "marginal" or "outside" */
  char linear_timevarying[16];
  char linear_constant[16];
} cb_regime;

typedef struct cb_gumbel {
  double a;
  double b;
} cb_gumbel;

/* Message of the last failed call on this thread; never NULL. */
CB_API const char* cb_last_error(void);
CB_API const char* cb_version(void);
/* Frees strings returned through char** out-parameters. */
CB_API void cb_string_free(char* s);

/* Configuration. Keys and values use the config-file syntax, e.g.
   cb_config_set(c, "system", "nonlinear") or cb_config_apply(c, "eps=1e-3"). */
CB_API cb_status cb_config_new(cb_config** out);
CB_API cb_status cb_config_from_file(const char* path, cb_config** out);
CB_API cb_status cb_config_from_string(const char* toml, cb_config** out);
/* Preset verification run: "linear-constant", "linear-timevarying",
   "nonlinear", "coupled" or "scaling". */
CB_API cb_status cb_config_law_recipe(const char* name, cb_config** out);
CB_API cb_status cb_config_clone(const cb_config* config, cb_config** out);
CB_API cb_status cb_config_set(cb_config* config, const char* key,
                               const char* value);
CB_API cb_status cb_config_apply(cb_config* config, const char* assignment);
/* Fills unset thresholds with the limit-law tolerances of the system. */
CB_API cb_status cb_config_use_law_thresholds(cb_config* config);
CB_API cb_status cb_config_validate(const cb_config* config);
CB_API void cb_config_free(cb_config* config);

/* Experiments. A report is returned even when thresholds fail; query
   cb_report_passed. Outputs named in the config are written. */
CB_API cb_status cb_run(const cb_config* config, cb_report** out);
CB_API void cb_report_free(cb_report* report);
CB_API cb_status cb_report_row_count(const cb_report* report, int64_t* out);
CB_API cb_status cb_report_row(const cb_report* report, int64_t index,
                               cb_row* out);
/* First hitting time of b on link (1-based); NaN when not observed. */
CB_API cb_status cb_report_link_time(const cb_report* report, int64_t index,
                                     int32_t link, double* out);
/* sup_t ||Z_t - X_t|| of a coupled path. */
CB_API cb_status cb_report_s_star(const cb_report* report, int64_t index,
                                  double* out);
CB_API cb_status cb_report_passed(const cb_report* report, int* out);
CB_API cb_status cb_report_summary_json(const cb_report* report, char** out);
CB_API cb_status cb_report_csv(const cb_report* report, char** out);
CB_API cb_status cb_report_write(const cb_report* report, const char* csv_path,
                                 const char* json_path);

/* axis: "eps", "sigma", "d", "b_break" or "n_paths". */
CB_API cb_status cb_sweep_run(const cb_config* config, const char* axis,
                              const double* values, size_t count,
                              cb_sweep** out);
CB_API size_t cb_sweep_size(const cb_sweep* sweep);
/* Borrowed pointer, valid until cb_sweep_free. */
CB_API const cb_report* cb_sweep_report(const cb_sweep* sweep, size_t index);
CB_API void cb_sweep_free(cb_sweep* sweep);

/* Two-sample comparison of break times against the reduced standard problem;
   *passed is set when the KS distance is at most ks_max. */
CB_API cb_status cb_verify_scaling(const cb_config* config, double ks_max,
                                   char** json_out, int* passed);
/* Covariance oracle table as CSV; times may be NULL for the default grid. */
CB_API cb_status cb_oracle_table(const cb_config* config, const double* times,
                                 size_t count, char** csv_out);
CB_API cb_status cb_check_regime(double eps, double sigma, cb_regime* out);

/* Model helpers. */
CB_API cb_status cb_t_star(int32_t d, double eps, double b_break, double* out);
CB_API cb_status cb_normalize_break_time(double tau, int32_t d, double eps,
                                         double sigma, double b_break,
                                         double u_curv, double* out);
/* Gumbel parameters of the chain break (link 0) or of link i. */
CB_API cb_status cb_limit_law(int32_t d, double u_curv, int32_t link,
                              cb_gumbel* out);
CB_API double cb_gumbel_cdf(double r, double a, double b);
/* Writes d probabilities. */
CB_API cb_status cb_position_probs(int32_t d, double* out);
CB_API cb_status cb_reduce_to_standard(double u, double b_break, double eps,
                                       double sigma, double* eps_std,
                                       double* sigma_std, double* time_factor);

#ifdef __cplusplus
}
#endif

#endif /* CHAINBREAK_CHAINBREAK_H_ */
