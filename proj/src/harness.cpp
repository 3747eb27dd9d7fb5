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

#include "tfpsp/harness.hpp"

#include "tfpsp/io.hpp"
#include "tfpsp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include "json.hpp"
#include <thread>

namespace tfpsp
{

const char *to_string(PilotScheme s)
{
    return s == PilotScheme::tfpsp ? "tfpsp" : "fpsp";
}

const char *to_string(EstimatorKind e)
{
    return e == EstimatorKind::iga ? "iga" : "mmse";
}

void ScenarioSpec::validate() const
{
    cfg.validate();
    if (F_theta < 1 || F_tau < 1 || F_nu < 1)
        throw SpecError("fine factors must be >= 1");
    if ((cfg.M * F_theta) % 2 != 0 || (cfg.N_p * F_nu) % 2 != 0)
        throw SpecError("angle and Doppler grid sizes must be even");
    if (gen.paths_per_ut < 1)
        throw SpecError("paths_per_ut must be >= 1");
    if (!(gen.decay >= 0.0) || !std::isfinite(gen.decay))
        throw SpecError("generator decay must be finite and >= 0");
    if (schemes.empty())
        throw SpecError("at least one pilot scheme is required");
    if (estimators.empty())
        throw SpecError("at least one estimator is required");
    for (double s : snr_db)
        if (!std::isfinite(s))
            throw SpecError("SNR values must be finite");
    if (trials < 1)
        throw SpecError("trials must be >= 1");
    if (!(sched.gamma >= 0.0 && sched.gamma < 1.0))
        throw SpecError("scheduler gamma must lie in [0, 1)");
    if (mmse_cap < 1)
        throw SpecError("mmse_cap must be >= 1");
    est.validate();
}

ScenarioSpec desk_profile(std::size_t U)
{
    ScenarioSpec s;
    s.cfg.M = 16;
    s.cfg.U = U;
    s.cfg.N_c = 256;
    s.cfg.N_g = 16;
    s.cfg.K = 48;
    s.cfg.k0 = 0;
    s.cfg.delta_f = 15e3;
    s.cfg.N_b = 4;
    s.cfg.N_p = 4;
    s.cfg.f_c = 5.8e9;
    s.cfg.v_speed = 3.0 / 3.6;
    s.F_theta = s.F_tau = s.F_nu = 2;
    s.gen.paths_per_ut = 4;
    return s;
}

ScenarioSpec full_profile(std::size_t U)
{
    ScenarioSpec s;
    s.cfg.M = 128;
    s.cfg.U = U;
    s.cfg.N_c = 2048;
    s.cfg.N_g = 144;
    s.cfg.K = 360;
    s.cfg.k0 = 0;
    s.cfg.delta_f = 15e3;
    s.cfg.N_b = 14;
    s.cfg.N_p = 8;
    s.cfg.f_c = 5.8e9;
    s.cfg.v_speed = 3.0 / 3.6;
    s.F_theta = s.F_tau = s.F_nu = 2;
    s.gen.paths_per_ut = 8;
    return s;
}

double sigma_z_for_snr(double sigma_p, double snr_db)
{
    return sigma_p * std::pow(10.0, -snr_db / 10.0);
}

double nmse(const std::vector<DenseTensor> &estimates, const std::vector<DenseTensor> &truths, std::size_t *skipped)
{
    if (estimates.size() != truths.size())
        throw ShapeError("nmse: estimate and truth counts differ");
    double acc = 0.0;
    std::size_t used = 0, skip = 0;
    for (std::size_t u = 0; u < truths.size(); ++u)
    {
        if (estimates[u].shape() != truths[u].shape())
            throw ShapeError("nmse: shape mismatch " + shape_str(estimates[u].shape()) + " vs " +
                             shape_str(truths[u].shape()));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < truths[u].size(); ++i)
        {
            num += std::norm(estimates[u][i] - truths[u][i]);
            den += std::norm(truths[u][i]);
        }
        if (den <= 0.0)
        {
            ++skip;
            continue;
        }
        acc += num / den;
        ++used;
    }
    if (skipped)
        *skipped = skip;
    return used ? acc / double(used) : 0.0;
}

double nmse_db(double v)
{
    if (!(v > 0.0))
        return -200.0;
    return std::max(-200.0, 10.0 * std::log10(v));
}

std::vector<UserChannel> Scenario::channels() const
{
    const TBGrid g = grid();
    std::vector<UserChannel> out;
    out.reserve(paths.size());
    for (const auto &p : paths)
        out.push_back(build_tb_channel(p, g));
    return out;
}

Scenario make_scenario(const ScenarioSpec &spec, std::uint64_t seed)
{
    Scenario sc;
    sc.cfg = spec.cfg;
    if (!spec.snr_db.empty())
        sc.cfg.sigma_z = sigma_z_for_snr(spec.cfg.sigma_p, spec.snr_db.front());
    sc.F_theta = spec.F_theta;
    sc.F_tau = spec.F_tau;
    sc.F_nu = spec.F_nu;
    const auto chans = synthesize_scenario(sc.cfg, sc.grid(), spec.gen, stream_seed(seed, Stream::scenario));
    for (const auto &c : chans)
        sc.paths.push_back(c.paths);
    return sc;
}

namespace
{

// Last N_b symbols of a full-frame SFT tensor (M, K, N_s).
DenseTensor last_slot(const DenseTensor &full, const SystemConfig &cfg)
{
    const std::size_t M = full.shape()[0], K = full.shape()[1], Ns = full.shape()[2];
    DenseTensor out({M, K, cfg.N_b});
    for (std::size_t s = 0; s < cfg.N_b; ++s)
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t m = 0; m < M; ++m)
                out(m, k, s) = full(m, k, Ns - cfg.N_b + s);
    return out;
}

// The estimate of the last pilot symbol held over N_b symbols.
DenseTensor hold_last_pilot(const DenseTensor &pilot, const SystemConfig &cfg)
{
    const std::size_t M = pilot.shape()[0], K = pilot.shape()[1], Np = pilot.shape()[2];
    DenseTensor out({M, K, cfg.N_b});
    for (std::size_t s = 0; s < cfg.N_b; ++s)
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t m = 0; m < M; ++m)
                out(m, k, s) = pilot(m, k, Np - 1);
    return out;
}

DenseTensor unit_noise(const Shape &shape, std::uint64_t seed)
{
    DenseTensor Z(shape);
    std::mt19937_64 rng(seed);
    for (auto &z : Z.values())
        z = cgauss(rng, 1.0);
    return Z;
}

struct Estimated
{
    DenseTensor H;
    std::size_t iterations = 0;
    bool converged = true;
    double final_change = 0.0;
};

Estimated run_estimator(EstimatorKind kind, const DenseTensor &Y, const AggregateModel &model,
                        const EstimatorConfig &est, std::size_t cap)
{
    Estimated e;
    if (kind == EstimatorKind::iga)
    {
        IGAResult r = iga_run(Y, model, est);
        e.H = std::move(r.H);
        e.iterations = r.iterations;
        e.converged = r.converged;
        e.final_change = r.final_change;
    }
    else
    {
        e.H = mmse_oracle(Y, model, cap);
    }
    return e;
}

} // namespace

std::vector<TrialOutcome> run_trial(const ScenarioSpec &spec, std::uint64_t seed)
{
    const Scenario sc = make_scenario(spec, seed);
    SystemConfig cfg = sc.cfg;
    const TBGrid grid = sc.grid();
    const BeamOperators ops = build_beam_operators(cfg, grid);
    const BasicSequences basic = make_basic_sequences(cfg);
    const auto chans = sc.channels();

    std::vector<RealTensor> W;
    std::vector<DenseTensor> truth_pilot, truth_data;
    for (std::size_t u = 0; u < chans.size(); ++u)
    {
        W.push_back(chans[u].W);
        truth_pilot.push_back(sft_direct_offgrid(chans[u].paths, cfg, Segment::pilot));
        if (spec.predict)
            truth_data.push_back(last_slot(sft_direct_offgrid(chans[u].paths, cfg, Segment::full), cfg));
    }
    const DenseTensor Z = unit_noise({cfg.M, cfg.K, cfg.N_p}, stream_seed(seed, Stream::noise));

    std::vector<TrialOutcome> out;
    for (PilotScheme scheme : spec.schemes)
    {
        ScheduleOptions opt = spec.sched;
        opt.scheme = scheme;
        ScheduleReport rep;
        PilotAssignment a;
        std::string sched_error;
        try
        {
            a = schedule(W, grid, cfg, opt, &rep);
        }
        catch (const std::exception &ex)
        {
            sched_error = ex.what();
        }

        DenseTensor Y0;
        AggregateModel model;
        if (sched_error.empty())
        {
            SystemConfig quiet = cfg;
            quiet.sigma_z = 0.0;
            Y0 = received_signal(truth_pilot, a, basic, quiet, 0).Y;
            model = make_aggregate_model(cfg, grid, ops, basic, W, a);
        }

        for (double snr : spec.snr_db)
        {
            const double sz = sigma_z_for_snr(cfg.sigma_p, snr);
            for (EstimatorKind kind : spec.estimators)
            {
                TrialOutcome o;
                o.snr_db = snr;
                o.scheme = scheme;
                o.estimator = kind;
                o.seed = seed;
                o.groups = rep.groups;
                o.max_residual_eta = rep.max_residual_eta;
                o.objective = rep.objective;
                if (!sched_error.empty())
                {
                    o.ok = false;
                    o.error = sched_error;
                    out.push_back(std::move(o));
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    model.cfg.sigma_z = sz;
                    DenseTensor Y = Y0;
                    const double s = std::sqrt(sz);
                    for (std::size_t i = 0; i < Y.size(); ++i)
                        Y[i] += s * Z[i];

                    Estimated e = run_estimator(kind, Y, model, spec.est, spec.mmse_cap);
                    o.iterations = e.iterations;
                    o.converged = e.converged;
                    o.final_change = e.final_change;

                    const auto per_ut = recover_per_ut(e.H, model, W, a);
                    std::vector<DenseTensor> est_pilot;
                    for (const auto &h : per_ut)
                        est_pilot.push_back(tb_to_sft(h, ops, Segment::pilot));
                    o.nmse = nmse(est_pilot, truth_pilot);
                    if (spec.predict)
                    {
                        std::vector<DenseTensor> pred, stale;
                        for (std::size_t u = 0; u < per_ut.size(); ++u)
                        {
                            pred.push_back(predict_data_segment(per_ut[u], ops, cfg));
                            stale.push_back(hold_last_pilot(est_pilot[u], cfg));
                        }
                        o.nmse_pred = nmse(pred, truth_data);
                        o.nmse_stale = nmse(stale, truth_data);
                    }
                    if (!std::isfinite(o.nmse))
                        throw DivergenceError("non-finite NMSE");
                }
                catch (const DivergenceError &ex)
                {
                    o.ok = false;
                    o.diverged = true;
                    o.error = ex.what();
                }
                catch (const std::exception &ex)
                {
                    o.ok = false;
                    o.error = ex.what();
                }
                o.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                out.push_back(std::move(o));
            }
        }
    }
    return out;
}

namespace
{

struct CellKey
{
    double snr;
    std::string scheme, estimator;
    bool operator<(const CellKey &o) const
    {
        if (snr != o.snr)
            return snr < o.snr;
        if (scheme != o.scheme)
            return scheme < o.scheme;
        return estimator < o.estimator;
    }
};

struct CellAcc
{
    std::vector<double> lin, iters;
};

SweepRow finish_row(const CellKey &k, const CellAcc &c)
{
    SweepRow r;
    r.snr_db = k.snr;
    r.scheme = k.scheme;
    r.estimator = k.estimator;
    r.trials = c.lin.size();
    if (c.lin.empty())
    {
        r.mean_nmse_db = r.std_nmse_db = r.mean_iters = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double mean = 0.0, mdb = 0.0, it = 0.0;
    for (std::size_t i = 0; i < c.lin.size(); ++i)
    {
        mean += c.lin[i];
        mdb += nmse_db(c.lin[i]);
        it += c.iters[i];
    }
    const double n = double(c.lin.size());
    mean /= n;
    mdb /= n;
    double var = 0.0;
    for (double v : c.lin)
        var += (nmse_db(v) - mdb) * (nmse_db(v) - mdb);
    r.mean_nmse_db = nmse_db(mean);
    r.std_nmse_db = c.lin.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    r.mean_iters = it / n;
    return r;
}

} // namespace

std::vector<SweepRow> aggregate(const std::vector<TrialOutcome> &outcomes, std::size_t)
{
    std::map<CellKey, CellAcc> cells;
    for (const auto &o : outcomes)
    {
        const std::string est = to_string(o.estimator);
        CellKey key{o.snr_db, to_string(o.scheme), est};
        auto &c = cells[key];
        if (!o.ok)
            continue;
        c.lin.push_back(o.nmse);
        c.iters.push_back(double(o.iterations));
        if (o.nmse_pred >= 0.0)
        {
            auto &p = cells[CellKey{o.snr_db, key.scheme, est + "-predicted"}];
            p.lin.push_back(o.nmse_pred);
            p.iters.push_back(double(o.iterations));
            auto &s = cells[CellKey{o.snr_db, key.scheme, est + "-stale"}];
            s.lin.push_back(o.nmse_stale);
            s.iters.push_back(double(o.iterations));
        }
    }
    std::vector<SweepRow> rows;
    for (const auto &[k, c] : cells)
        rows.push_back(finish_row(k, c));
    return rows;
}

SweepResult sweep(const ScenarioSpec &spec)
{
    spec.validate();
    std::vector<std::vector<TrialOutcome>> per_trial(spec.trials);
    std::size_t nthreads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min(nthreads, spec.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < spec.trials; t = next++)
            per_trial[t] = run_trial(spec, trial_seed(spec.master_seed, t));
    };
    if (nthreads <= 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    struct Tagged
    {
        std::size_t trial;
        TrialOutcome o;
    };
    std::vector<Tagged> all;
    for (std::size_t t = 0; t < per_trial.size(); ++t)
        for (auto &o : per_trial[t])
            all.push_back({t, std::move(o)});
    std::stable_sort(all.begin(), all.end(), [](const Tagged &a, const Tagged &b) {
        CellKey ka{a.o.snr_db, to_string(a.o.scheme), to_string(a.o.estimator)};
        CellKey kb{b.o.snr_db, to_string(b.o.scheme), to_string(b.o.estimator)};
        if (ka < kb)
            return true;
        if (kb < ka)
            return false;
        return a.trial < b.trial;
    });

    SweepResult res;
    for (auto &t : all)
    {
        if (!t.o.ok)
            ++res.failed;
        res.outcomes.push_back(std::move(t.o));
    }
    res.rows = aggregate(res.outcomes, spec.trials);
    return res;
}

EstimateOutput estimate_scenario(const Scenario &sc, const PilotAssignment &a, EstimatorKind kind,
                                 const EstimatorConfig &est, std::uint64_t noise_seed, std::size_t mmse_cap)
{
    const SystemConfig &cfg = sc.cfg;
    cfg.validate();
    if (sc.paths.size() != cfg.U)
        throw SpecError("scenario has " + std::to_string(sc.paths.size()) + " UTs but U = " + std::to_string(cfg.U));
    a.validate(cfg);
    if (a.pairs.size() != cfg.U)
        throw SpecError("assignment covers " + std::to_string(a.pairs.size()) + " UTs but U = " +
                        std::to_string(cfg.U));
    const TBGrid grid = sc.grid();
    const BeamOperators ops = build_beam_operators(cfg, grid);
    const BasicSequences basic = make_basic_sequences(cfg);
    const auto chans = sc.channels();
    std::vector<RealTensor> W;
    for (const auto &c : chans)
        W.push_back(c.W);

    const ReceivedPilot rx = tfpsp_received_signal(chans, a, basic, cfg, noise_seed);
    const AggregateModel model = make_aggregate_model(cfg, grid, ops, basic, W, a);
    Estimated e = run_estimator(kind, rx.Y, model, est, mmse_cap);

    EstimateOutput out;
    out.estimator = to_string(kind);
    out.per_ut = recover_per_ut(e.H, model, W, a);
    out.aggregate = std::move(e.H);
    out.support_size = model.S.size();
    out.iterations = e.iterations;
    out.converged = e.converged;
    out.final_residual = e.final_change;
    out.sft_shape = {cfg.M, cfg.K, cfg.N_p};

    std::vector<DenseTensor> est_pilot, truth;
    for (std::size_t u = 0; u < chans.size(); ++u)
    {
        est_pilot.push_back(tb_to_sft(out.per_ut[u], ops, Segment::pilot));
        truth.push_back(sft_direct_offgrid(chans[u].paths, cfg, Segment::pilot));
    }
    out.nmse = nmse(est_pilot, truth);
    return out;
}

SimulateSummary simulate(const ScenarioSpec &spec, const std::string &out_dir)
{
    spec.validate();
    if (spec.snr_db.empty())
        throw SpecError("simulate needs at least one SNR point");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::uint64_t seed = trial_seed(spec.master_seed, 0);
    const Scenario sc = make_scenario(spec, seed);

    std::vector<RealTensor> W;
    for (const auto &c : sc.channels())
        W.push_back(c.W);
    ScheduleOptions opt = spec.sched;
    opt.scheme = spec.schemes.front();
    SimulateSummary sum;
    const PilotAssignment a = schedule(W, sc.grid(), sc.cfg, opt, &sum.schedule);

    const EstimatorKind kind = spec.estimators.front();
    sum.estimate = estimate_scenario(sc, a, kind, spec.est, stream_seed(seed, Stream::noise), spec.mmse_cap);

    const fs::path dir(out_dir);
    save_scenario((dir / "scenario.json").string(), sc);
    save_assignment((dir / "assignment.json").string(), a);
    {
        std::ofstream os(dir / "estimate.txt");
        if (!os)
            throw IoError("cannot write " + (dir / "estimate.txt").string());
        write_estimate_dump(os, sum.estimate, sc.grid().shape());
    }
    nlohmann::json j;
    j["schema"] = "tfpsp-summary/1";
    j["snr_db"] = spec.snr_db.front();
    j["scheme"] = to_string(opt.scheme);
    j["estimator"] = to_string(kind);
    j["groups"] = sum.schedule.groups;
    j["max_residual_eta"] = sum.schedule.max_residual_eta;
    j["objective"] = sum.schedule.objective;
    j["support_size"] = sum.estimate.support_size;
    j["iterations"] = sum.estimate.iterations;
    j["converged"] = sum.estimate.converged;
    j["final_residual"] = sum.estimate.final_residual;
    j["nmse"] = sum.estimate.nmse;
    j["nmse_db"] = nmse_db(sum.estimate.nmse);
    write_text_file((dir / "summary.json").string(), j.dump(2) + "\n");
    return sum;
}

} // namespace tfpsp
