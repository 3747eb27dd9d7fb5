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

#include "tfpsp.h"

#include "tfpsp/harness.hpp"
#include "tfpsp/io.hpp"
#include "tfpsp/rng.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

struct tfpsp_spec
{
    tfpsp::ScenarioSpec spec;
};

struct tfpsp_scenario
{
    tfpsp::Scenario sc;
};

struct tfpsp_assignment
{
    tfpsp::PilotAssignment a;
};

struct tfpsp_estimate
{
    tfpsp::EstimateOutput e;
    tfpsp::Shape grid_shape;
};

namespace
{

thread_local std::string last_error;

tfpsp_status fail(tfpsp_status s, const std::string &msg)
{
    last_error = msg;
    return s;
}

// Maps library exceptions onto status codes.
template <typename F>
tfpsp_status guarded(F &&f)
{
    try
    {
        last_error.clear();
        f();
        return TFPSP_OK;
    }
    catch (const tfpsp::SpecError &e)
    {
        return fail(TFPSP_ERR_SPEC, e.what());
    }
    catch (const tfpsp::DivergenceError &e)
    {
        return fail(TFPSP_ERR_DIVERGENCE, e.what());
    }
    catch (const tfpsp::CapError &e)
    {
        return fail(TFPSP_ERR_CAP, e.what());
    }
    catch (const tfpsp::IoError &e)
    {
        return fail(TFPSP_ERR_IO, e.what());
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        return fail(TFPSP_ERR_IO, e.what());
    }
    catch (const std::invalid_argument &e)
    {
        return fail(TFPSP_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::exception &e)
    {
        return fail(TFPSP_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
        return fail(TFPSP_ERR_INTERNAL, "unknown error");
    }
}

#define TFPSP_REQUIRE(cond)                                                                                           \
    do                                                                                                                 \
    {                                                                                                                  \
        if (!(cond))                                                                                                   \
            return fail(TFPSP_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond);                               \
    } while (0)

} // namespace

extern "C" {

const char *tfpsp_version(void)
{
    return "1.0.0";
}

const char *tfpsp_last_error(void)
{
    return last_error.c_str();
}

const char *tfpsp_status_string(tfpsp_status s)
{
    switch (s)
    {
    case TFPSP_OK:
        return "ok";
    case TFPSP_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case TFPSP_ERR_SPEC:
        return "specification error";
    case TFPSP_ERR_DIVERGENCE:
        return "numerical divergence";
    case TFPSP_ERR_IO:
        return "I/O error";
    case TFPSP_ERR_CAP:
        return "size cap exceeded";
    case TFPSP_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

tfpsp_status tfpsp_spec_load(const char *path, tfpsp_spec **out)
{
    TFPSP_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new tfpsp_spec{tfpsp::load_spec(path)}; });
}

tfpsp_status tfpsp_spec_parse(const char *json_text, tfpsp_spec **out)
{
    TFPSP_REQUIRE(json_text && out);
    *out = nullptr;
    return guarded([&] { *out = new tfpsp_spec{tfpsp::parse_spec(json_text)}; });
}

void tfpsp_spec_free(tfpsp_spec *spec)
{
    delete spec;
}

tfpsp_status tfpsp_scenario_synthesize(const tfpsp_spec *spec, uint64_t trial, tfpsp_scenario **out)
{
    TFPSP_REQUIRE(spec && out);
    *out = nullptr;
    return guarded([&] {
        *out = new tfpsp_scenario{
            tfpsp::make_scenario(spec->spec, tfpsp::trial_seed(spec->spec.master_seed, trial))};
    });
}

tfpsp_status tfpsp_scenario_load(const char *path, tfpsp_scenario **out)
{
    TFPSP_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new tfpsp_scenario{tfpsp::load_scenario(path)}; });
}

tfpsp_status tfpsp_scenario_save(const tfpsp_scenario *sc, const char *path)
{
    TFPSP_REQUIRE(sc && path);
    return guarded([&] { tfpsp::save_scenario(path, sc->sc); });
}

tfpsp_status tfpsp_scenario_num_uts(const tfpsp_scenario *sc, size_t *out)
{
    TFPSP_REQUIRE(sc && out);
    *out = sc->sc.paths.size();
    return TFPSP_OK;
}

void tfpsp_scenario_free(tfpsp_scenario *sc)
{
    delete sc;
}

tfpsp_status tfpsp_assignment_load(const char *path, tfpsp_assignment **out)
{
    TFPSP_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new tfpsp_assignment{tfpsp::load_assignment(path)}; });
}

tfpsp_status tfpsp_assignment_save(const tfpsp_assignment *a, const char *path)
{
    TFPSP_REQUIRE(a && path);
    return guarded([&] { tfpsp::save_assignment(path, a->a); });
}

tfpsp_status tfpsp_assignment_get(const tfpsp_assignment *a, size_t ut, size_t *phi, size_t *varphi)
{
    TFPSP_REQUIRE(a && phi && varphi);
    if (ut >= a->a.pairs.size())
        return fail(TFPSP_ERR_INVALID_ARGUMENT, "UT index out of range");
    *phi = a->a.pairs[ut].phi;
    *varphi = a->a.pairs[ut].varphi;
    return TFPSP_OK;
}

size_t tfpsp_assignment_size(const tfpsp_assignment *a)
{
    return a ? a->a.pairs.size() : 0;
}

void tfpsp_assignment_free(tfpsp_assignment *a)
{
    delete a;
}

tfpsp_status tfpsp_schedule(const tfpsp_scenario *sc, double gamma, tfpsp_scheme scheme, size_t phi_stride,
                            tfpsp_assignment **out, tfpsp_schedule_report *report)
{
    TFPSP_REQUIRE(sc && out);
    TFPSP_REQUIRE(scheme == TFPSP_SCHEME_TFPSP || scheme == TFPSP_SCHEME_FPSP);
    *out = nullptr;
    return guarded([&] {
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw tfpsp::SpecError("gamma must lie in [0, 1)");
        sc->sc.cfg.validate();
        std::vector<tfpsp::RealTensor> W;
        for (const auto &c : sc->sc.channels())
            W.push_back(c.W);
        tfpsp::ScheduleOptions opt;
        opt.gamma = gamma;
        opt.phi_stride = phi_stride;
        opt.scheme = scheme == TFPSP_SCHEME_FPSP ? tfpsp::PilotScheme::fpsp : tfpsp::PilotScheme::tfpsp;
        tfpsp::ScheduleReport rep;
        auto a = std::make_unique<tfpsp_assignment>();
        a->a = tfpsp::schedule(W, sc->sc.grid(), sc->sc.cfg, opt, &rep);
        if (report)
            *report = {rep.groups, rep.max_residual_eta, rep.objective};
        *out = a.release();
    });
}

void tfpsp_estimator_options_default(tfpsp_estimator_options *opt)
{
    if (!opt)
        return;
    const tfpsp::EstimatorConfig d;
    opt->alpha = d.alpha;
    opt->t_max = d.t_max;
    opt->tol = d.tol;
    opt->mmse_cap = 4096;
    opt->noise_seed = 1;
}

tfpsp_status tfpsp_estimate_run(const tfpsp_scenario *sc, const tfpsp_assignment *a, tfpsp_estimator_kind kind,
                                const tfpsp_estimator_options *opt, tfpsp_estimate **out)
{
    TFPSP_REQUIRE(sc && a && out);
    TFPSP_REQUIRE(kind == TFPSP_ESTIMATOR_IGA || kind == TFPSP_ESTIMATOR_MMSE);
    *out = nullptr;
    tfpsp_estimator_options o;
    tfpsp_estimator_options_default(&o);
    if (opt)
        o = *opt;
    return guarded([&] {
        tfpsp::EstimatorConfig est;
        est.alpha = o.alpha;
        est.t_max = o.t_max;
        est.tol = o.tol;
        est.validate();
        auto e = std::make_unique<tfpsp_estimate>();
        e->e = tfpsp::estimate_scenario(sc->sc, a->a,
                                        kind == TFPSP_ESTIMATOR_MMSE ? tfpsp::EstimatorKind::mmse
                                                                     : tfpsp::EstimatorKind::iga,
                                        est, o.noise_seed, o.mmse_cap);
        e->grid_shape = sc->sc.grid().shape();
        *out = e.release();
    });
}

tfpsp_status tfpsp_estimate_get_info(const tfpsp_estimate *e, tfpsp_estimate_info *info)
{
    TFPSP_REQUIRE(e && info);
    info->support_size = e->e.support_size;
    info->iterations = e->e.iterations;
    info->converged = e->e.converged ? 1 : 0;
    info->final_residual = e->e.final_residual;
    info->nmse = e->e.nmse;
    return TFPSP_OK;
}

tfpsp_status tfpsp_estimate_copy_ut(const tfpsp_estimate *e, size_t ut, double *buf, size_t buf_len,
                                    size_t shape[3])
{
    TFPSP_REQUIRE(e);
    if (ut >= e->e.per_ut.size())
        return fail(TFPSP_ERR_INVALID_ARGUMENT, "UT index out of range");
    const auto &t = e->e.per_ut[ut];
    if (shape)
        for (int i = 0; i < 3; ++i)
            shape[i] = t.shape()[i];
    if (!buf)
        return TFPSP_OK;
    if (buf_len < 2 * t.size())
        return fail(TFPSP_ERR_INVALID_ARGUMENT, "buffer too small");
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        buf[2 * i] = t[i].real();
        buf[2 * i + 1] = t[i].imag();
    }
    return TFPSP_OK;
}

tfpsp_status tfpsp_estimate_save(const tfpsp_estimate *e, const char *path)
{
    TFPSP_REQUIRE(e && path);
    return guarded([&] {
        std::ofstream os(path);
        if (!os)
            throw tfpsp::IoError(std::string("cannot write ") + path);
        tfpsp::write_estimate_dump(os, e->e, e->grid_shape);
        if (!os)
            throw tfpsp::IoError(std::string("write failed: ") + path);
    });
}

tfpsp_status tfpsp_estimate_load(const char *path, tfpsp_estimate **out)
{
    TFPSP_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] {
        std::ifstream is(path);
        if (!is)
            throw tfpsp::IoError(std::string("cannot open ") + path);
        auto e = std::make_unique<tfpsp_estimate>();
        e->e = tfpsp::read_estimate_dump(is, &e->grid_shape);
        *out = e.release();
    });
}

void tfpsp_estimate_free(tfpsp_estimate *e)
{
    delete e;
}

tfpsp_status tfpsp_sweep_csv(const tfpsp_spec *spec, const char *csv_path, size_t *failed, size_t *diverged)
{
    TFPSP_REQUIRE(spec && csv_path);
    return guarded([&] {
        const auto res = tfpsp::sweep(spec->spec);
        tfpsp::write_text_file(csv_path, tfpsp::format_csv(res.rows));
        if (failed)
            *failed = res.failed;
        if (diverged)
        {
            *diverged = 0;
            for (const auto &o : res.outcomes)
                *diverged += o.diverged ? 1 : 0;
        }
    });
}

tfpsp_status tfpsp_simulate(const tfpsp_spec *spec, const char *out_dir, tfpsp_estimate_info *info)
{
    TFPSP_REQUIRE(spec && out_dir);
    return guarded([&] {
        const auto sum = tfpsp::simulate(spec->spec, out_dir);
        if (info)
            *info = {sum.estimate.support_size, sum.estimate.iterations, sum.estimate.converged ? 1 : 0,
                     sum.estimate.final_residual, sum.estimate.nmse};
    });
}

} // extern "C"
