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

#include "tfpsp/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace tfpsp
{

using nlohmann::json;

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string read_text_file(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::string &path, const std::string &text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot write " + path);
    os << text;
    if (!os)
        throw IoError("write failed: " + path);
}

namespace
{

json parse_json(const std::string &text, const char *what)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw SpecError(std::string(what) + ": " + e.what());
    }
}

void check_schema(const json &j, const char *expected)
{
    if (!j.is_object())
        throw SpecError("document must be a JSON object");
    if (!j.contains("schema"))
        throw SpecError(std::string("missing \"schema\" (expected \"") + expected + "\")");
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != expected)
        throw SpecError(std::string("unsupported schema ") + j["schema"].dump() + ", expected \"" + expected + "\"");
}

void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
    if (!j.is_object())
        throw SpecError(where + " must be an object");
    for (const auto &[k, v] : j.items())
        if (!allowed.count(k))
            throw SpecError("unknown key \"" + k + "\" in " + where);
}

template <typename T>
void read_opt(const json &j, const char *key, T &dst, const std::string &where)
{
    if (!j.contains(key))
        return;
    try
    {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>)
        {
            if (!j[key].is_number_unsigned())
                throw SpecError(where + "." + key + " must be a non-negative integer");
        }
        else if constexpr (std::is_same_v<T, double>)
        {
            if (!j[key].is_number())
                throw SpecError(where + "." + key + " must be a number");
        }
        dst = j[key].get<T>();
    }
    catch (const json::exception &e)
    {
        throw SpecError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T read_req(const json &j, const char *key, const std::string &where)
{
    if (!j.contains(key))
        throw SpecError("missing " + where + "." + key);
    T v{};
    read_opt(j, key, v, where);
    return v;
}

const std::set<std::string> system_keys{"M", "U", "f_c", "N_c", "N_g", "K", "k0", "delta_f", "N_b",
                                        "N_p", "v_speed", "sigma_p", "sigma_z", "n_T"};

void read_system(const json &j, SystemConfig &c, const std::string &where)
{
    check_keys(j, system_keys, where);
    read_opt(j, "M", c.M, where);
    read_opt(j, "U", c.U, where);
    read_opt(j, "f_c", c.f_c, where);
    read_opt(j, "N_c", c.N_c, where);
    read_opt(j, "N_g", c.N_g, where);
    read_opt(j, "K", c.K, where);
    read_opt(j, "k0", c.k0, where);
    read_opt(j, "delta_f", c.delta_f, where);
    read_opt(j, "N_b", c.N_b, where);
    read_opt(j, "N_p", c.N_p, where);
    read_opt(j, "v_speed", c.v_speed, where);
    read_opt(j, "sigma_p", c.sigma_p, where);
    read_opt(j, "sigma_z", c.sigma_z, where);
    read_opt(j, "n_T", c.n_T, where);
}

json write_system(const SystemConfig &c, bool with_sigma_z)
{
    json j;
    j["M"] = c.M;
    j["U"] = c.U;
    j["f_c"] = c.f_c;
    j["N_c"] = c.N_c;
    j["N_g"] = c.N_g;
    j["K"] = c.K;
    j["k0"] = c.k0;
    j["delta_f"] = c.delta_f;
    j["N_b"] = c.N_b;
    j["N_p"] = c.N_p;
    j["v_speed"] = c.v_speed;
    j["sigma_p"] = c.sigma_p;
    if (with_sigma_z)
        j["sigma_z"] = c.sigma_z;
    j["n_T"] = c.n_T;
    return j;
}

void read_grid(const json &j, std::size_t &ft, std::size_t &fd, std::size_t &fn, const std::string &where)
{
    check_keys(j, {"F_theta", "F_tau", "F_nu"}, where);
    read_opt(j, "F_theta", ft, where);
    read_opt(j, "F_tau", fd, where);
    read_opt(j, "F_nu", fn, where);
}

PilotScheme scheme_from(const std::string &s)
{
    if (s == "tfpsp")
        return PilotScheme::tfpsp;
    if (s == "fpsp")
        return PilotScheme::fpsp;
    throw SpecError("unknown pilot scheme \"" + s + "\" (tfpsp|fpsp)");
}

EstimatorKind estimator_from(const std::string &s)
{
    if (s == "iga")
        return EstimatorKind::iga;
    if (s == "mmse")
        return EstimatorKind::mmse;
    throw SpecError("unknown estimator \"" + s + "\" (iga|mmse)");
}

template <typename T, typename F>
std::vector<T> read_name_list(const json &j, const char *key, F conv)
{
    if (!j[key].is_array())
        throw SpecError(std::string(key) + " must be an array of strings");
    std::vector<T> out;
    for (const auto &e : j[key])
    {
        if (!e.is_string())
            throw SpecError(std::string(key) + " must be an array of strings");
        out.push_back(conv(e.get<std::string>()));
    }
    return out;
}

} // namespace

ScenarioSpec parse_spec(const std::string &text)
{
    const json j = parse_json(text, "spec");
    check_schema(j, spec_schema);
    check_keys(j,
               {"schema", "system", "grid", "generator", "schemes", "estimators", "estimator", "scheduler", "snr_db",
                "trials", "master_seed", "predict", "threads", "mmse_cap"},
               "spec");
    std::size_t U = 24;
    if (j.contains("system") && j["system"].is_object())
        read_opt(j["system"], "U", U, "system");
    ScenarioSpec s = desk_profile(U);
    if (j.contains("system"))
        read_system(j["system"], s.cfg, "system");
    if (j.contains("grid"))
        read_grid(j["grid"], s.F_theta, s.F_tau, s.F_nu, "grid");
    if (j.contains("generator"))
    {
        const json &g = j["generator"];
        check_keys(g, {"paths_per_ut", "on_grid", "decay"}, "generator");
        read_opt(g, "paths_per_ut", s.gen.paths_per_ut, "generator");
        read_opt(g, "on_grid", s.gen.on_grid, "generator");
        read_opt(g, "decay", s.gen.decay, "generator");
    }
    if (j.contains("schemes"))
        s.schemes = read_name_list<PilotScheme>(j, "schemes", scheme_from);
    if (j.contains("estimators"))
        s.estimators = read_name_list<EstimatorKind>(j, "estimators", estimator_from);
    if (j.contains("estimator"))
    {
        const json &e = j["estimator"];
        check_keys(e, {"alpha", "t_max", "tol", "sonp", "fast_path"}, "estimator");
        read_opt(e, "alpha", s.est.alpha, "estimator");
        read_opt(e, "t_max", s.est.t_max, "estimator");
        read_opt(e, "tol", s.est.tol, "estimator");
        if (e.contains("sonp"))
        {
            const std::string v = read_req<std::string>(e, "sonp", "estimator");
            if (v == "squared")
                s.est.sonp = SonpVariant::squared;
            else if (v == "literal")
                s.est.sonp = SonpVariant::literal;
            else
                throw SpecError("estimator.sonp must be \"squared\" or \"literal\"");
        }
        if (e.contains("fast_path"))
        {
            const std::string v = read_req<std::string>(e, "fast_path", "estimator");
            if (v == "fft")
                s.est.path = FastPath::fft;
            else if (v == "naive")
                s.est.path = FastPath::naive;
            else
                throw SpecError("estimator.fast_path must be \"fft\" or \"naive\"");
        }
    }
    if (j.contains("scheduler"))
    {
        const json &g = j["scheduler"];
        check_keys(g, {"gamma", "phi_stride", "full_phi_scan"}, "scheduler");
        read_opt(g, "gamma", s.sched.gamma, "scheduler");
        read_opt(g, "phi_stride", s.sched.phi_stride, "scheduler");
        read_opt(g, "full_phi_scan", s.sched.full_phi_scan, "scheduler");
    }
    if (j.contains("snr_db"))
    {
        if (!j["snr_db"].is_array())
            throw SpecError("snr_db must be an array of numbers");
        s.snr_db.clear();
        for (const auto &v : j["snr_db"])
        {
            if (!v.is_number())
                throw SpecError("snr_db must be an array of numbers");
            s.snr_db.push_back(v.get<double>());
        }
    }
    read_opt(j, "trials", s.trials, "spec");
    read_opt(j, "master_seed", s.master_seed, "spec");
    read_opt(j, "predict", s.predict, "spec");
    read_opt(j, "threads", s.threads, "spec");
    read_opt(j, "mmse_cap", s.mmse_cap, "spec");
    s.validate();
    return s;
}

ScenarioSpec load_spec(const std::string &path)
{
    return parse_spec(read_text_file(path));
}

std::string spec_to_json(const ScenarioSpec &s)
{
    json j;
    j["schema"] = spec_schema;
    j["system"] = write_system(s.cfg, false);
    j["grid"] = {{"F_theta", s.F_theta}, {"F_tau", s.F_tau}, {"F_nu", s.F_nu}};
    j["generator"] = {{"paths_per_ut", s.gen.paths_per_ut}, {"on_grid", s.gen.on_grid}, {"decay", s.gen.decay}};
    j["schemes"] = json::array();
    for (auto v : s.schemes)
        j["schemes"].push_back(to_string(v));
    j["estimators"] = json::array();
    for (auto v : s.estimators)
        j["estimators"].push_back(to_string(v));
    j["estimator"] = {{"alpha", s.est.alpha},
                      {"t_max", s.est.t_max},
                      {"tol", s.est.tol},
                      {"sonp", s.est.sonp == SonpVariant::squared ? "squared" : "literal"},
                      {"fast_path", s.est.path == FastPath::fft ? "fft" : "naive"}};
    j["scheduler"] = {
        {"gamma", s.sched.gamma}, {"phi_stride", s.sched.phi_stride}, {"full_phi_scan", s.sched.full_phi_scan}};
    j["snr_db"] = s.snr_db;
    j["trials"] = s.trials;
    j["master_seed"] = s.master_seed;
    j["predict"] = s.predict;
    j["threads"] = s.threads;
    j["mmse_cap"] = s.mmse_cap;
    return j.dump(2) + "\n";
}

std::string scenario_to_json(const Scenario &sc)
{
    json j;
    j["schema"] = scenario_schema;
    j["system"] = write_system(sc.cfg, true);
    j["grid"] = {{"F_theta", sc.F_theta}, {"F_tau", sc.F_tau}, {"F_nu", sc.F_nu}};
    j["uts"] = json::array();
    for (std::size_t u = 0; u < sc.paths.size(); ++u)
    {
        json ut;
        ut["id"] = u;
        ut["paths"] = json::array();
        for (const auto &p : sc.paths[u])
            ut["paths"].push_back({{"gain_re", p.gain.real()},
                                   {"gain_im", p.gain.imag()},
                                   {"theta", p.theta},
                                   {"tau", p.tau},
                                   {"nu", p.nu},
                                   {"power", p.power}});
        j["uts"].push_back(std::move(ut));
    }
    return j.dump(1) + "\n";
}

Scenario parse_scenario(const std::string &text)
{
    const json j = parse_json(text, "scenario");
    check_schema(j, scenario_schema);
    check_keys(j, {"schema", "system", "grid", "uts"}, "scenario");
    Scenario sc;
    if (!j.contains("system") || !j.contains("uts"))
        throw SpecError("scenario needs \"system\" and \"uts\"");
    read_system(j["system"], sc.cfg, "system");
    if (j.contains("grid"))
        read_grid(j["grid"], sc.F_theta, sc.F_tau, sc.F_nu, "grid");
    if (!j["uts"].is_array())
        throw SpecError("uts must be an array");
    sc.paths.resize(j["uts"].size());
    std::vector<bool> seen(sc.paths.size(), false);
    for (const auto &ut : j["uts"])
    {
        check_keys(ut, {"id", "paths"}, "uts[]");
        const auto id = read_req<std::size_t>(ut, "id", "uts[]");
        if (id >= sc.paths.size() || seen[id])
            throw SpecError("UT ids must be unique and cover 0..U-1");
        seen[id] = true;
        if (!ut.contains("paths") || !ut["paths"].is_array())
            throw SpecError("uts[].paths must be an array");
        for (const auto &p : ut["paths"])
        {
            check_keys(p, {"gain_re", "gain_im", "theta", "tau", "nu", "power"}, "path");
            Path q;
            q.gain = {read_req<double>(p, "gain_re", "path"), read_req<double>(p, "gain_im", "path")};
            q.theta = read_req<double>(p, "theta", "path");
            q.tau = read_req<double>(p, "tau", "path");
            q.nu = read_req<double>(p, "nu", "path");
            q.power = read_req<double>(p, "power", "path");
            sc.paths[id].push_back(q);
        }
    }
    if (sc.paths.size() != sc.cfg.U)
        throw SpecError("scenario lists " + std::to_string(sc.paths.size()) + " UTs but system.U = " +
                        std::to_string(sc.cfg.U));
    sc.cfg.validate();
    return sc;
}

void save_scenario(const std::string &path, const Scenario &sc)
{
    write_text_file(path, scenario_to_json(sc));
}

Scenario load_scenario(const std::string &path)
{
    return parse_scenario(read_text_file(path));
}

std::string assignment_to_json(const PilotAssignment &a)
{
    json j;
    j["schema"] = assignment_schema;
    j["assignment"] = json::array();
    for (std::size_t u = 0; u < a.pairs.size(); ++u)
        j["assignment"].push_back({{"ut", u}, {"phi", a.pairs[u].phi}, {"varphi", a.pairs[u].varphi}});
    return j.dump(1) + "\n";
}

PilotAssignment parse_assignment(const std::string &text)
{
    const json j = parse_json(text, "assignment");
    check_schema(j, assignment_schema);
    check_keys(j, {"schema", "assignment"}, "assignment");
    if (!j.contains("assignment") || !j["assignment"].is_array())
        throw SpecError("assignment must be an array");
    PilotAssignment a;
    a.pairs.resize(j["assignment"].size());
    std::vector<bool> seen(a.pairs.size(), false);
    for (const auto &e : j["assignment"])
    {
        check_keys(e, {"ut", "phi", "varphi"}, "assignment[]");
        const auto u = read_req<std::size_t>(e, "ut", "assignment[]");
        if (u >= a.pairs.size() || seen[u])
            throw SpecError("assignment UT ids must be unique and cover 0..U-1");
        seen[u] = true;
        a.pairs[u].phi = read_req<std::size_t>(e, "phi", "assignment[]");
        a.pairs[u].varphi = read_req<std::size_t>(e, "varphi", "assignment[]");
    }
    return a;
}

void save_assignment(const std::string &path, const PilotAssignment &a)
{
    write_text_file(path, assignment_to_json(a));
}

PilotAssignment load_assignment(const std::string &path)
{
    return parse_assignment(read_text_file(path));
}

namespace
{

void write_sparse(std::ostream &os, const DenseTensor &t)
{
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != cplx{})
            ++nnz;
    os << nnz << "\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != cplx{})
            os << i << ' ' << format_double(t[i].real()) << ' ' << format_double(t[i].imag()) << "\n";
}

double parse_double(const std::string &s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw IoError("bad number \"" + s + "\"");
    return v;
}

DenseTensor read_sparse(std::istream &is, const Shape &shape, std::size_t nnz)
{
    DenseTensor t(shape);
    for (std::size_t n = 0; n < nnz; ++n)
    {
        std::size_t idx;
        std::string re, im;
        if (!(is >> idx >> re >> im))
            throw IoError("truncated payload");
        if (idx >= t.size())
            throw IoError("payload index out of range");
        t[idx] = {parse_double(re), parse_double(im)};
    }
    return t;
}

} // namespace

void write_estimate_dump(std::ostream &os, const EstimateOutput &e, const Shape &grid_shape)
{
    os << "# " << estimate_schema << "\n";
    os << "estimator " << e.estimator << "\n";
    os << "grid_shape " << grid_shape[0] << ' ' << grid_shape[1] << ' ' << grid_shape[2] << "\n";
    os << "sft_shape " << e.sft_shape[0] << ' ' << e.sft_shape[1] << ' ' << e.sft_shape[2] << "\n";
    os << "num_uts " << e.per_ut.size() << "\n";
    os << "support_size " << e.support_size << "\n";
    os << "iterations " << e.iterations << "\n";
    os << "converged " << (e.converged ? 1 : 0) << "\n";
    os << "final_residual " << format_double(e.final_residual) << "\n";
    os << "nmse " << format_double(e.nmse) << "\n";
    os << "aggregate ";
    write_sparse(os, e.aggregate);
    for (std::size_t u = 0; u < e.per_ut.size(); ++u)
    {
        os << "ut " << u << ' ';
        write_sparse(os, e.per_ut[u]);
    }
    os << "end\n";
}

EstimateOutput read_estimate_dump(std::istream &is, Shape *grid_shape_out)
{
    std::string line;
    if (!std::getline(is, line) || line != std::string("# ") + estimate_schema)
        throw IoError("not a tfpsp estimate dump");
    EstimateOutput e;
    Shape grid(3, 0);
    e.sft_shape.assign(3, 0);
    std::size_t num_uts = 0;
    std::string key;
    while (is >> key)
    {
        if (key == "estimator")
            is >> e.estimator;
        else if (key == "grid_shape")
            is >> grid[0] >> grid[1] >> grid[2];
        else if (key == "sft_shape")
            is >> e.sft_shape[0] >> e.sft_shape[1] >> e.sft_shape[2];
        else if (key == "num_uts")
            is >> num_uts;
        else if (key == "support_size")
            is >> e.support_size;
        else if (key == "iterations")
            is >> e.iterations;
        else if (key == "converged")
        {
            int c = 0;
            is >> c;
            e.converged = c != 0;
        }
        else if (key == "final_residual" || key == "nmse")
        {
            std::string v;
            is >> v;
            (key == "nmse" ? e.nmse : e.final_residual) = parse_double(v);
        }
        else if (key == "aggregate")
        {
            std::size_t nnz = 0;
            is >> nnz;
            e.aggregate = read_sparse(is, grid, nnz);
        }
        else if (key == "ut")
        {
            std::size_t u = 0, nnz = 0;
            is >> u >> nnz;
            if (u != e.per_ut.size())
                throw IoError("UT payloads out of order");
            e.per_ut.push_back(read_sparse(is, grid, nnz));
        }
        else if (key == "end")
            break;
        else
            throw IoError("unknown estimate dump key \"" + key + "\"");
        if (!is)
            throw IoError("malformed estimate dump near \"" + key + "\"");
    }
    if (key != "end")
        throw IoError("estimate dump missing end marker");
    if (e.per_ut.size() != num_uts)
        throw IoError("estimate dump UT count mismatch");
    if (grid_shape_out)
        *grid_shape_out = grid;
    return e;
}

std::string format_csv(const std::vector<SweepRow> &rows)
{
    std::string out = csv_header;
    out += "\n";
    for (const auto &r : rows)
    {
        out += format_double(r.snr_db) + "," + r.scheme + "," + r.estimator + "," + format_double(r.mean_nmse_db) +
               "," + format_double(r.std_nmse_db) + "," + format_double(r.mean_iters) + "," +
               std::to_string(r.trials) + "\n";
    }
    return out;
}

std::vector<SweepRow> parse_csv(const std::string &text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw IoError("CSV header mismatch");
    std::vector<SweepRow> rows;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 7)
            throw IoError("CSV row needs 7 fields: " + line);
        SweepRow r;
        r.snr_db = parse_double(f[0]);
        r.scheme = f[1];
        r.estimator = f[2];
        r.mean_nmse_db = parse_double(f[3]);
        r.std_nmse_db = parse_double(f[4]);
        r.mean_iters = parse_double(f[5]);
        r.trials = std::stoul(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace tfpsp
