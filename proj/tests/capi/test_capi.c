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

/* Exercises the C interface from plain C. */
#include "tfpsp.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                                                                   \
    do                                                                                                                 \
    {                                                                                                                  \
        if (!(cond))                                                                                                   \
        {                                                                                                              \
            fprintf(stderr, "%s:%d: expectation failed: %s (last error: %s)\n", __FILE__, __LINE__, #cond,            \
                    tfpsp_last_error());                                                                               \
            ++failures;                                                                                                \
        }                                                                                                              \
    } while (0)

static const char *spec_json = "{\"schema\":\"tfpsp-spec/1\",\"system\":{\"U\":3},\"snr_db\":[20],\"trials\":2,"
                               "\"estimators\":[\"iga\"],\"master_seed\":7}";

int main(int argc, char **argv)
{
    const char *dir = argc > 1 ? argv[1] : ".";
    char path_sc[1024], path_as[1024], path_est[1024], path_csv[1024];
    snprintf(path_sc, sizeof path_sc, "%s/capi_scenario.json", dir);
    snprintf(path_as, sizeof path_as, "%s/capi_assignment.json", dir);
    snprintf(path_est, sizeof path_est, "%s/capi_estimate.txt", dir);
    snprintf(path_csv, sizeof path_csv, "%s/capi_sweep.csv", dir);

    EXPECT(strlen(tfpsp_version()) > 0);
    EXPECT(strcmp(tfpsp_status_string(TFPSP_ERR_SPEC), tfpsp_status_string(TFPSP_OK)) != 0);

    /* Errors map to status codes. */
    tfpsp_spec *spec = NULL;
    EXPECT(tfpsp_spec_parse("{\"schema\":\"tfpsp-spec/1\",\"system\":{\"K\":0}}", &spec) == TFPSP_ERR_SPEC);
    EXPECT(spec == NULL);
    EXPECT(strlen(tfpsp_last_error()) > 0);
    EXPECT(tfpsp_spec_parse("{oops", &spec) == TFPSP_ERR_SPEC);
    EXPECT(tfpsp_spec_parse(NULL, &spec) == TFPSP_ERR_INVALID_ARGUMENT);
    EXPECT(tfpsp_spec_load("/nonexistent/spec.json", &spec) == TFPSP_ERR_IO);

    EXPECT(tfpsp_spec_parse(spec_json, &spec) == TFPSP_OK);

    tfpsp_scenario *sc = NULL;
    EXPECT(tfpsp_scenario_synthesize(spec, 0, &sc) == TFPSP_OK);
    size_t U = 0;
    EXPECT(tfpsp_scenario_num_uts(sc, &U) == TFPSP_OK);
    EXPECT(U == 3);
    EXPECT(tfpsp_scenario_save(sc, path_sc) == TFPSP_OK);
    tfpsp_scenario *sc2 = NULL;
    EXPECT(tfpsp_scenario_load(path_sc, &sc2) == TFPSP_OK);

    tfpsp_assignment *a = NULL;
    tfpsp_schedule_report rep;
    EXPECT(tfpsp_schedule(sc2, 1.5, TFPSP_SCHEME_TFPSP, 0, &a, &rep) != TFPSP_OK);
    EXPECT(tfpsp_schedule(sc2, 0.05, TFPSP_SCHEME_TFPSP, 0, &a, &rep) == TFPSP_OK);
    EXPECT(tfpsp_assignment_size(a) == 3);
    EXPECT(rep.groups >= 1);
    size_t phi = 99, varphi = 99;
    EXPECT(tfpsp_assignment_get(a, 0, &phi, &varphi) == TFPSP_OK);
    EXPECT(phi == 0 && varphi == 0);
    EXPECT(tfpsp_assignment_get(a, 3, &phi, &varphi) == TFPSP_ERR_INVALID_ARGUMENT);
    EXPECT(tfpsp_assignment_save(a, path_as) == TFPSP_OK);
    tfpsp_assignment *a2 = NULL;
    EXPECT(tfpsp_assignment_load(path_as, &a2) == TFPSP_OK);

    tfpsp_estimator_options opt;
    tfpsp_estimator_options_default(&opt);
    EXPECT(opt.alpha > 0.0 && opt.alpha <= 1.0);

    tfpsp_estimate *e = NULL;
    EXPECT(tfpsp_estimate_run(sc2, a2, TFPSP_ESTIMATOR_MMSE, &opt, &e) == TFPSP_OK);
    tfpsp_estimate_info info;
    EXPECT(tfpsp_estimate_get_info(e, &info) == TFPSP_OK);
    EXPECT(info.nmse >= 0.0 && info.nmse < 1.0);
    EXPECT(info.support_size > 0);

    size_t shape[3] = {0, 0, 0};
    EXPECT(tfpsp_estimate_copy_ut(e, 0, NULL, 0, shape) == TFPSP_OK); /* shape query */
    const size_t n = shape[0] * shape[1] * shape[2];
    EXPECT(n > 0);
    double *buf = (double *)malloc(2 * n * sizeof(double));
    EXPECT(tfpsp_estimate_copy_ut(e, 0, buf, 2 * n - 1, shape) == TFPSP_ERR_INVALID_ARGUMENT);
    EXPECT(tfpsp_estimate_copy_ut(e, 0, buf, 2 * n, shape) == TFPSP_OK);
    double energy = 0.0;
    for (size_t i = 0; i < 2 * n; ++i)
        energy += buf[i] * buf[i];
    EXPECT(energy > 0.0 && isfinite(energy));

    EXPECT(tfpsp_estimate_save(e, path_est) == TFPSP_OK);
    tfpsp_estimate *e2 = NULL;
    EXPECT(tfpsp_estimate_load(path_est, &e2) == TFPSP_OK);
    tfpsp_estimate_info info2;
    EXPECT(tfpsp_estimate_get_info(e2, &info2) == TFPSP_OK);
    EXPECT(info2.nmse == info.nmse);
    EXPECT(info2.support_size == info.support_size);
    double *buf2 = (double *)malloc(2 * n * sizeof(double));
    EXPECT(tfpsp_estimate_copy_ut(e2, 0, buf2, 2 * n, shape) == TFPSP_OK);
    /* Numerically identical; the sparse dump does not keep the sign of zero entries. */
    int same = 1;
    for (size_t i = 0; i < 2 * n; ++i)
        same &= buf[i] == buf2[i];
    EXPECT(same);

    /* Dense solve cap. */
    tfpsp_estimator_options capped = opt;
    capped.mmse_cap = 1;
    tfpsp_estimate *e3 = NULL;
    EXPECT(tfpsp_estimate_run(sc2, a2, TFPSP_ESTIMATOR_MMSE, &capped, &e3) == TFPSP_ERR_CAP);
    EXPECT(e3 == NULL);

    tfpsp_estimate *e4 = NULL;
    EXPECT(tfpsp_estimate_run(sc2, a2, TFPSP_ESTIMATOR_IGA, NULL, &e4) == TFPSP_OK);

    size_t failed = 1, diverged = 1;
    EXPECT(tfpsp_sweep_csv(spec, path_csv, &failed, &diverged) == TFPSP_OK);
    EXPECT(failed == 0 && diverged == 0);

    free(buf);
    free(buf2);
    tfpsp_estimate_free(e);
    tfpsp_estimate_free(e2);
    tfpsp_estimate_free(e4);
    tfpsp_assignment_free(a);
    tfpsp_assignment_free(a2);
    tfpsp_scenario_free(sc);
    tfpsp_scenario_free(sc2);
    tfpsp_spec_free(spec);
    tfpsp_spec_free(NULL);

    if (failures)
    {
        fprintf(stderr, "%d C API expectation(s) failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
