#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "beltrami/structure.hpp"

namespace beltrami {

using json = nlohmann::json;

// Invalid configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StructureSpec {
    std::string kind = "linear";  // linear | power | frozen | holder_linear
    cplx mu{0.5, 0.0};
    cplx nu{0.0, 0.0};
    double alpha = 0.5;
    double K = 2.0;               // power
    double amplitude = 0.4;       // holder_linear
    cplx z0{0.0, 0.0};            // frozen
    std::shared_ptr<StructureSpec> base;  // frozen
};

struct RunConfig {
    std::string subcommand;
    StructureSpec structure;
    bool structure_given = false;
    cplx center{0.0, 0.0};
    double radius = 1.0;
    int n = 128;
    double tol = -1.0;  // nonpositive selects the solver default
    int max_iters = 200;
    std::uint64_t seed = 0;
    int samples = 2000;
    std::string samples_file;
    std::string output_dir = "out";
};

// Merge a config file (may be empty) into defaults and validate. Throws
// ConfigError on unknown keys, bad types or out-of-range values.
RunConfig parse_run_config(const std::string& subcommand, const json& file);

StructureFunction build_structure(const StructureSpec& spec);

json config_echo(const RunConfig& cfg);

struct Assertion {
    std::string name;
    double bound;
    double measured;
    bool pass;
};

Assertion assert_le(std::string name, double measured, double bound);
Assertion assert_ge(std::string name, double measured, double bound);

struct RunReport {
    std::string subcommand;
    json config;
    std::vector<Assertion> assertions;
    std::vector<std::string> artifacts;

    bool all_pass() const;
    json to_json() const;
};

// One named column per entry; all columns must have equal length.
using PlotColumns = std::vector<std::pair<std::string, std::vector<double>>>;
std::string emit_plot_table(const std::string& dir, const std::string& name,
                            const PlotColumns& columns);

// Executes the subcommand, writes run-config.json, report.json and artifacts
// into cfg.output_dir. Returns 0 when every assertion passed, else 1.
int run(const RunConfig& cfg);

}  // namespace beltrami
