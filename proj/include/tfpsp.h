// SPDX-License-Identifier: Apache-2.0
//
// tfpsp: tensor channel estimation library and simulator
// Copyright (C) 2026 The tfpsp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/* C interface to the tfpsp library. All handles are opaque; every call returns a status code
 * and tfpsp_last_error() describes the most recent failure on the calling thread. */
#ifndef TFPSP_H
#define TFPSP_H

#include <stddef.h>
#include <stdint.h>

#if defined(TFPSP_BUILDING)
#define TFPSP_API __attribute__((visibility("default")))
#else
#define TFPSP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tfpsp_status
{
    TFPSP_OK = 0,
    TFPSP_ERR_INVALID_ARGUMENT = 1,
    TFPSP_ERR_SPEC = 2,
    TFPSP_ERR_DIVERGENCE = 3,
    TFPSP_ERR_IO = 4,
    TFPSP_ERR_CAP = 5,
    TFPSP_ERR_INTERNAL = 6
} tfpsp_status;

typedef enum tfpsp_estimator_kind
{
    TFPSP_ESTIMATOR_IGA = 0,
    TFPSP_ESTIMATOR_MMSE = 1
} tfpsp_estimator_kind;

typedef enum tfpsp_scheme
{
    TFPSP_SCHEME_TFPSP = 0,
    TFPSP_SCHEME_FPSP = 1
} tfpsp_scheme;

typedef struct tfpsp_spec tfpsp_spec;
typedef struct tfpsp_scenario tfpsp_scenario;
typedef struct tfpsp_assignment tfpsp_assignment;
typedef struct tfpsp_estimate tfpsp_estimate;

TFPSP_API const char *tfpsp_version(void);
TFPSP_API const char *tfpsp_last_error(void);
TFPSP_API const char *tfpsp_status_string(tfpsp_status s);

/* Simulation specification (JSON, schema "tfpsp-spec/1"). */
TFPSP_API tfpsp_status tfpsp_spec_load(const char *path, tfpsp_spec **out);
TFPSP_API tfpsp_status tfpsp_spec_parse(const char *json_text, tfpsp_spec **out);
TFPSP_API void tfpsp_spec_free(tfpsp_spec *spec);

/* Scenario: system parameters plus per-UT path lists (JSON, schema "tfpsp-scenario/1"). */
TFPSP_API tfpsp_status tfpsp_scenario_synthesize(const tfpsp_spec *spec, uint64_t trial, tfpsp_scenario **out);
TFPSP_API tfpsp_status tfpsp_scenario_load(const char *path, tfpsp_scenario **out);
TFPSP_API tfpsp_status tfpsp_scenario_save(const tfpsp_scenario *sc, const char *path);
TFPSP_API tfpsp_status tfpsp_scenario_num_uts(const tfpsp_scenario *sc, size_t *out);
TFPSP_API void tfpsp_scenario_free(tfpsp_scenario *sc);

/* Pilot assignment: UT -> (phi, varphi) (JSON, schema "tfpsp-assignment/1"). */
TFPSP_API tfpsp_status tfpsp_assignment_load(const char *path, tfpsp_assignment **out);
TFPSP_API tfpsp_status tfpsp_assignment_save(const tfpsp_assignment *a, const char *path);
TFPSP_API tfpsp_status tfpsp_assignment_get(const tfpsp_assignment *a, size_t ut, size_t *phi, size_t *varphi);
TFPSP_API size_t tfpsp_assignment_size(const tfpsp_assignment *a);
TFPSP_API void tfpsp_assignment_free(tfpsp_assignment *a);

typedef struct tfpsp_schedule_report
{
    size_t groups;
    double max_residual_eta;
    double objective;
} tfpsp_schedule_report;

/* phi_stride = 0 selects N_f. */
TFPSP_API tfpsp_status tfpsp_schedule(const tfpsp_scenario *sc, double gamma, tfpsp_scheme scheme, size_t phi_stride,
                                      tfpsp_assignment **out, tfpsp_schedule_report *report);

typedef struct tfpsp_estimator_options
{
    double alpha;
    size_t t_max;
    double tol;
    size_t mmse_cap;
    uint64_t noise_seed;
} tfpsp_estimator_options;

TFPSP_API void tfpsp_estimator_options_default(tfpsp_estimator_options *opt);

typedef struct tfpsp_estimate_info
{
    size_t support_size;
    size_t iterations;
    int converged;
    double final_residual;
    double nmse;
} tfpsp_estimate_info;

/* opt may be NULL for defaults. */
TFPSP_API tfpsp_status tfpsp_estimate_run(const tfpsp_scenario *sc, const tfpsp_assignment *a,
                                          tfpsp_estimator_kind kind, const tfpsp_estimator_options *opt,
                                          tfpsp_estimate **out);
TFPSP_API tfpsp_status tfpsp_estimate_get_info(const tfpsp_estimate *e, tfpsp_estimate_info *info);
/* Copies the TB-domain estimate of one UT (interleaved re/im, first index fastest). */
TFPSP_API tfpsp_status tfpsp_estimate_copy_ut(const tfpsp_estimate *e, size_t ut, double *buf, size_t buf_len,
                                              size_t shape[3]);
TFPSP_API tfpsp_status tfpsp_estimate_save(const tfpsp_estimate *e, const char *path);
TFPSP_API tfpsp_status tfpsp_estimate_load(const char *path, tfpsp_estimate **out);
TFPSP_API void tfpsp_estimate_free(tfpsp_estimate *e);

/* Monte-Carlo sweep written as CSV. failed and diverged (either may be NULL) receive the number of
 * failed trial cells and how many of those failed through numerical divergence. */
TFPSP_API tfpsp_status tfpsp_sweep_csv(const tfpsp_spec *spec, const char *csv_path, size_t *failed,
                                       size_t *diverged);

/* Writes scenario.json, assignment.json, estimate.txt and summary.json into out_dir. */
TFPSP_API tfpsp_status tfpsp_simulate(const tfpsp_spec *spec, const char *out_dir, tfpsp_estimate_info *info);

#ifdef __cplusplus
}
#endif

#endif
