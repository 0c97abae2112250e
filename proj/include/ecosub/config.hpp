#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecosub/bifurcation.hpp"
#include "ecosub/complementarity.hpp"
#include "ecosub/core_model.hpp"
#include "ecosub/mpe_solver.hpp"
#include "ecosub/signaling.hpp"
#include "ecosub/simulator.hpp"
#include "ecosub/welfare.hpp"

namespace ecosub {

enum class JobKind { Solve, Simulate, Deviation, Sweep, Region, Welfare, Signal, Check };

std::string job_name(JobKind k);
std::optional<JobKind> parse_job_name(const std::string& s);

struct WelfareConfig {
    int cournot_n = 2;
    double effective_price = 10.0;
    double mapping = 1.0;
    CsIntegrand integrand = CsIntegrand::Literal;
    bool use_solution = false;  // solve the MPE and report the CS gain
    double S = 0.0;             // aggregate per-period subsidy for DE and the crossover
    double horizon_T = 10.0;
    double per_period_cs_gain = 0.0;
    double ps_loss = 0.0;
    std::vector<double> caps;
};

struct JobConfig {
    JobKind kind = JobKind::Solve;
    std::optional<std::string> preset;
    ModelParams model;
    ComplementaritySpec psi;
    SolverConfig solver;
    SimulationConfig simulation;
    int seeds = 1;  // simulate: seeds seed, seed+1, ... are summarized
    SweepSpec sweep;
    double jump_factor = 10.0;
    RegionAxis region_x, region_y;
    TypeSpace types;
    std::optional<double> signal_m;
    LinearMarket market;
    WelfareConfig welfare;
};

// Parses the YAML text; a preset named inside is loaded first and the text
// overrides it key by key. Throws ConfigError with line/column or field name.
JobConfig parse_config(const std::string& text);
JobConfig load_preset(const std::string& name);
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

// Canonical form: every resolved value, keys sorted.
nlohmann::json to_json(const JobConfig& cfg);
nlohmann::json spec_to_json(const ComplementaritySpec& spec);
std::string config_hash(const JobConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ecosub
