#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beltrami/runner.hpp"

namespace {

struct SubFlags {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int n = 0;
    double radius = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for nonlinear Beltrami equations"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs{
        {"solve", "Frozen-coefficient Riemann-Hilbert solve on a disk"},
        {"invert-structure", "Evaluate the inverse structure function H*"},
        {"verify", "Sample-check the declared structure constants"},
        {"holder", "Campanato exponent study of a solve"},
        {"transforms-test", "Disk transform identity and isometry checks"},
        {"suite", "Full release suite"}};

    std::vector<SubFlags> flags(subs.size());
    for (std::size_t i = 0; i < subs.size(); ++i) {
        SubFlags& f = flags[i];
        f.sub = app.add_subcommand(subs[i].first, subs[i].second);
        f.sub->add_option("--config", f.config_path, "JSON config file");
        f.sub->add_option("--seed", f.seed, "Random seed");
        f.sub->add_option("--out", f.out_dir, "Output directory");
        f.sub->add_option("--n", f.n, "Grid resolution");
        f.sub->add_option("--radius", f.radius, "Domain radius");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const SubFlags* chosen = nullptr;
    for (const SubFlags& f : flags)
        if (f.sub->parsed()) chosen = &f;
    if (!chosen) {
        std::cerr << "error: no subcommand selected\n";
        return 2;
    }

    try {
        beltrami::json file;
        if (!chosen->config_path.empty()) {
            std::ifstream in(chosen->config_path);
            if (!in)
                throw beltrami::ConfigError("cannot open config '" +
                                            chosen->config_path + "'");
            try {
                file = beltrami::json::parse(in);
            } catch (const beltrami::json::parse_error& e) {
                throw beltrami::ConfigError(std::string("config parse: ") +
                                            e.what());
            }
        } else {
            file = beltrami::json::object();
        }
        if (chosen->sub->count("--seed")) file["seed"] = chosen->seed;
        if (chosen->sub->count("--out")) file["output_dir"] = chosen->out_dir;
        if (chosen->sub->count("--n")) file["n"] = chosen->n;
        if (chosen->sub->count("--radius")) file["radius"] = chosen->radius;

        const beltrami::RunConfig cfg =
            beltrami::parse_run_config(chosen->sub->get_name(), file);
        return beltrami::run(cfg);
    } catch (const beltrami::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
