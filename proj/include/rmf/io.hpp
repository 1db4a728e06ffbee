#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/retraction.hpp"
#include "rmf/scf.hpp"

namespace rmf {

struct ProbeConfig {
    std::vector<std::vector<double>> subadditivity; // lambda vectors
    std::vector<double> concentration_radii;
    std::vector<double> descent_epsilons{1e-2, 1e-3, 1e-4};
    bool check_bounds = false;
};

struct RunConfig {
    ModelParams model;
    LatticeSpec lattice;
    SCFConfig scf;
    ProbeConfig probes;
    double defect_threshold = 0.3;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c); // every default materialized
bool operator==(const RunConfig& a, const RunConfig& b);

enum ExitCode : int {
    exit_ok = 0,
    exit_runtime_error = 1,
    exit_schema_error = 2,
    exit_regime_refused = 3,
    exit_not_converged = 4,
    exit_assertion_failed = 5,
};

struct RunOptions {
    std::string command = "solve"; // solve, validate, probe-subadditivity, probe-descent, check-bounds, spectrum
    bool override_regime = false;
    bool dump_fields = false;
    int threads = 1;
};

struct ResultBundle {
    nlohmann::json manifest;
    nlohmann::json results;
    std::map<std::string, std::string> tables; // file name -> contents
    std::vector<std::string> failures;
    std::vector<std::string> summary; // human-readable lines
    int exit_code = exit_ok;
};

ResultBundle run(const RunConfig& config, const RunOptions& options);
void write_bundle(const ResultBundle& bundle, const std::string& directory);

// Formatting helpers: 17 significant digits for machine tables, 6 for human output.
std::string fmt_machine(double v);
std::string fmt_human(double v);
std::string table_header(const std::string& title, const std::vector<std::string>& columns,
                         const std::string& units);

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const RegimeReport& r);
nlohmann::json to_json(const SubadditivityReport& r);
nlohmann::json to_json(const OperatorBoundsReport& r);

int threads_from_environment();

} // namespace rmf
