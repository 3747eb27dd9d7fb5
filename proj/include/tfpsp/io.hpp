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

#pragma once

#include "tfpsp/harness.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfpsp
{

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Schema tags written into every document.
inline constexpr const char *spec_schema = "tfpsp-spec/1";
inline constexpr const char *scenario_schema = "tfpsp-scenario/1";
inline constexpr const char *assignment_schema = "tfpsp-assignment/1";
inline constexpr const char *estimate_schema = "tfpsp-estimate/1";

// Shortest text that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

// Missing keys take the desk-profile defaults; unknown keys and bad values throw SpecError.
ScenarioSpec parse_spec(const std::string &json_text);
ScenarioSpec load_spec(const std::string &path);
std::string spec_to_json(const ScenarioSpec &spec);

std::string scenario_to_json(const Scenario &sc);
Scenario parse_scenario(const std::string &json_text);
void save_scenario(const std::string &path, const Scenario &sc);
Scenario load_scenario(const std::string &path);

std::string assignment_to_json(const PilotAssignment &a);
PilotAssignment parse_assignment(const std::string &json_text);
void save_assignment(const std::string &path, const PilotAssignment &a);
PilotAssignment load_assignment(const std::string &path);

// Text header (one "key value..." per line) followed by sparse payload blocks
// "aggregate <nnz>" and "ut <id> <nnz>", each line "<flat index> <re> <im>", closed by "end".
void write_estimate_dump(std::ostream &os, const EstimateOutput &e, const Shape &grid_shape);
EstimateOutput read_estimate_dump(std::istream &is, Shape *grid_shape = nullptr);

inline constexpr const char *csv_header = "snr_db,scheme,estimator,mean_nmse_db,std_nmse_db,mean_iters,trials";
std::string format_csv(const std::vector<SweepRow> &rows);
std::vector<SweepRow> parse_csv(const std::string &text);

} // namespace tfpsp
