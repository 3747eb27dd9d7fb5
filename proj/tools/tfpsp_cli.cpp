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

// Command-line front end. Links only against the C interface of libtfpsp.
#include "tfpsp.h"

#include "CLI11.hpp"

#include <cstdio>
#include <string>

namespace
{

// 0 success, 2 specification/validation failure, 3 numerical divergence, 1 anything else.
int exit_code(tfpsp_status s)
{
    switch (s)
    {
    case TFPSP_OK:
        return 0;
    case TFPSP_ERR_SPEC:
        return 2;
    case TFPSP_ERR_DIVERGENCE:
        return 3;
    default:
        return 1;
    }
}

int report(tfpsp_status s, const char *what)
{
    if (s != TFPSP_OK)
        std::fprintf(stderr, "tfpsp %s: %s: %s\n", what, tfpsp_status_string(s), tfpsp_last_error());
    return exit_code(s);
}

int cmd_simulate(const std::string &spec_path, const std::string &out_dir)
{
    tfpsp_spec *spec = nullptr;
    tfpsp_status s = tfpsp_spec_load(spec_path.c_str(), &spec);
    if (s != TFPSP_OK)
        return report(s, "simulate");
    tfpsp_estimate_info info{};
    s = tfpsp_simulate(spec, out_dir.c_str(), &info);
    tfpsp_spec_free(spec);
    if (s != TFPSP_OK)
        return report(s, "simulate");
    std::printf("wrote %s/{scenario.json,assignment.json,estimate.txt,summary.json}\n", out_dir.c_str());
    std::printf("support_size %zu iterations %zu converged %d final_residual %.6g nmse %.6g\n", info.support_size,
                info.iterations, info.converged, info.final_residual, info.nmse);
    return 0;
}

int cmd_schedule(const std::string &scenario_path, double gamma, const std::string &scheme, std::size_t stride,
                 const std::string &out_path)
{
    tfpsp_scenario *sc = nullptr;
    tfpsp_status s = tfpsp_scenario_load(scenario_path.c_str(), &sc);
    if (s != TFPSP_OK)
        return report(s, "schedule");
    tfpsp_assignment *a = nullptr;
    tfpsp_schedule_report rep{};
    s = tfpsp_schedule(sc, gamma, scheme == "fpsp" ? TFPSP_SCHEME_FPSP : TFPSP_SCHEME_TFPSP, stride, &a, &rep);
    tfpsp_scenario_free(sc);
    if (s == TFPSP_OK)
        s = tfpsp_assignment_save(a, out_path.c_str());
    if (s == TFPSP_OK)
    {
        std::printf("groups %zu max_residual_eta %.6g objective %.6g\n", rep.groups, rep.max_residual_eta,
                    rep.objective);
        for (std::size_t u = 0; u < tfpsp_assignment_size(a); ++u)
        {
            std::size_t phi = 0, varphi = 0;
            tfpsp_assignment_get(a, u, &phi, &varphi);
            std::printf("ut %zu phi %zu varphi %zu\n", u, phi, varphi);
        }
    }
    tfpsp_assignment_free(a);
    return report(s, "schedule");
}

int cmd_estimate(const std::string &scenario_path, const std::string &assignment_path, const std::string &kind,
                 const tfpsp_estimator_options &opt, const std::string &out_path)
{
    tfpsp_scenario *sc = nullptr;
    tfpsp_assignment *a = nullptr;
    tfpsp_estimate *e = nullptr;
    tfpsp_status s = tfpsp_scenario_load(scenario_path.c_str(), &sc);
    if (s == TFPSP_OK)
        s = tfpsp_assignment_load(assignment_path.c_str(), &a);
    if (s == TFPSP_OK)
        s = tfpsp_estimate_run(sc, a, kind == "mmse" ? TFPSP_ESTIMATOR_MMSE : TFPSP_ESTIMATOR_IGA, &opt, &e);
    if (s == TFPSP_OK)
        s = tfpsp_estimate_save(e, out_path.c_str());
    if (s == TFPSP_OK)
    {
        tfpsp_estimate_info info{};
        tfpsp_estimate_get_info(e, &info);
        std::printf("wrote %s\n", out_path.c_str());
        std::printf("support_size %zu iterations %zu converged %d final_residual %.6g nmse %.6g\n", info.support_size,
                    info.iterations, info.converged, info.final_residual, info.nmse);
    }
    tfpsp_estimate_free(e);
    tfpsp_assignment_free(a);
    tfpsp_scenario_free(sc);
    return report(s, "estimate");
}

int cmd_sweep(const std::string &spec_path, const std::string &csv_path)
{
    tfpsp_spec *spec = nullptr;
    tfpsp_status s = tfpsp_spec_load(spec_path.c_str(), &spec);
    if (s != TFPSP_OK)
        return report(s, "sweep");
    std::size_t failed = 0, diverged = 0;
    s = tfpsp_sweep_csv(spec, csv_path.c_str(), &failed, &diverged);
    tfpsp_spec_free(spec);
    if (s != TFPSP_OK)
        return report(s, "sweep");
    std::printf("wrote %s (%zu failed trial cells, %zu diverged)\n", csv_path.c_str(), failed, diverged);
    return diverged ? 3 : 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"tfpsp: multi-user channel estimation simulator"};
    app.set_version_flag("--version", std::string(tfpsp_version()));
    app.require_subcommand(1);

    std::string spec_path, out_dir = "out";
    auto *sim = app.add_subcommand("simulate", "Synthesize one scenario, schedule pilots and estimate");
    sim->add_option("--spec", spec_path, "Spec JSON")->required();
    sim->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::string scenario_path, scheme = "tfpsp", assign_out = "assignment.json";
    double gamma = 0.05;
    std::size_t stride = 0;
    auto *sch = app.add_subcommand("schedule", "Group UTs and assign pilot phase shifts");
    sch->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    sch->add_option("--gamma", gamma, "Overlap threshold in [0, 1)")->required();
    sch->add_option("--scheme", scheme, "tfpsp or fpsp")->capture_default_str()->check(CLI::IsMember({"tfpsp", "fpsp"}));
    sch->add_option("--phi-stride", stride, "Frequency phase step (0 = N_f)")->capture_default_str();
    sch->add_option("--out", assign_out, "Assignment JSON output")->capture_default_str();

    std::string assignment_path, estimator = "iga", est_out = "estimate.txt";
    tfpsp_estimator_options opt;
    tfpsp_estimator_options_default(&opt);
    auto *est = app.add_subcommand("estimate", "Estimate channels for a scenario and assignment");
    est->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    est->add_option("--assignment", assignment_path, "Assignment JSON")->required();
    est->add_option("--estimator", estimator, "iga or mmse")->required()->check(CLI::IsMember({"iga", "mmse"}));
    est->add_option("--alpha", opt.alpha, "Damping factor")->capture_default_str();
    est->add_option("--t-max", opt.t_max, "Iteration limit")->capture_default_str();
    est->add_option("--tol", opt.tol, "Convergence tolerance")->capture_default_str();
    est->add_option("--mmse-cap", opt.mmse_cap, "Largest dense solve for mmse")->capture_default_str();
    est->add_option("--noise-seed", opt.noise_seed, "Noise seed")->capture_default_str();
    est->add_option("--out", est_out, "Estimate dump output")->capture_default_str();

    std::string csv_path;
    auto *swp = app.add_subcommand("sweep", "Monte-Carlo NMSE sweep");
    swp->add_option("--spec", spec_path, "Spec JSON")->required();
    swp->add_option("--out", csv_path, "CSV output")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    if (*sim)
        return cmd_simulate(spec_path, out_dir);
    if (*sch)
        return cmd_schedule(scenario_path, gamma, scheme, stride, assign_out);
    if (*est)
        return cmd_estimate(scenario_path, assignment_path, estimator, opt, est_out);
    return cmd_sweep(spec_path, csv_path);
}
