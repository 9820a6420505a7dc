#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "beltrami/runner.hpp"

using namespace beltrami;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

#ifndef BELTRAMI_CLI_PATH
#error "BELTRAMI_CLI_PATH must point at the CLI binary"
#endif

const std::string kCli = BELTRAMI_CLI_PATH;

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd =
        "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    auto cfg = parse_run_config("solve", json::object());
    CHECK(cfg.subcommand == "solve");
    CHECK(cfg.n == 128);
    CHECK(cfg.radius == 1.0);
    CHECK(cfg.max_iters == 200);
    CHECK(cfg.seed == 0);
    CHECK(cfg.output_dir == "out");
    CHECK_FALSE(cfg.structure_given);

    json j = {{"n", 64},
              {"radius", 2.5},
              {"center", {0.5, -0.5}},
              {"seed", 7},
              {"output_dir", "elsewhere"},
              {"structure",
               {{"kind", "linear"}, {"mu", 0.25}, {"nu", {0.0, 0.1}}}}};
    auto c2 = parse_run_config("solve", j);
    CHECK(c2.n == 64);
    CHECK(c2.radius == 2.5);
    CHECK(c2.center == cplx(0.5, -0.5));
    CHECK(c2.seed == 7);
    CHECK(c2.structure_given);
    CHECK(c2.structure.mu == cplx(0.25, 0.0));
    CHECK(c2.structure.nu == cplx(0.0, 0.1));
}

TEST_CASE("config validation rejects bad values") {
    CHECK_THROWS_AS(parse_run_config("solve", json{{"n", 9}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"n", 4}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"n", 8192}}), ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"radius", 0.0}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"radius", -2.0}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"max_iters", 0}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"seed", -1}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"samples", 0}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"unknown_key", 1}}),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("solve", json{{"n", "many"}}),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("solve",
                         json{{"structure", {{"kind", "nonsense"}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("solve",
                         json{{"structure",
                               {{"kind", "linear"}, {"K", 2.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("solve",
                         json{{"structure",
                               {{"kind", "power"}, {"K", 0.5}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config("solve",
                         json{{"structure",
                               {{"kind", "linear"},
                                {"mu", 0.8},
                                {"nu", 0.3}}}}),
        ConfigError);
}

TEST_CASE("holder subcommand defaults to the power structure") {
    auto cfg = parse_run_config("holder", json::object());
    CHECK_FALSE(cfg.structure_given);
    CHECK(cfg.structure.kind == "power");
    CHECK(cfg.structure.K == 2.0);
}

TEST_CASE("build_structure covers every kind") {
    StructureSpec lin;
    lin.kind = "linear";
    lin.mu = cplx(0.25, 0);
    lin.nu = cplx(0, 0.25);
    auto L = build_structure(lin);
    CHECK(L.k() == doctest::Approx(0.5).epsilon(1e-14));

    StructureSpec pw;
    pw.kind = "power";
    pw.K = 2.0;
    auto P = build_structure(pw);
    CHECK(P.k() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    StructureSpec hl;
    hl.kind = "holder_linear";
    hl.amplitude = 0.4;
    hl.alpha = 0.5;
    auto Hl = build_structure(hl);
    CHECK(Hl.holder_const() == doctest::Approx(0.2).epsilon(1e-14));

    StructureSpec fz;
    fz.kind = "frozen";
    fz.z0 = cplx(1, 0);
    fz.base = std::make_shared<StructureSpec>(hl);
    auto F = build_structure(fz);
    CHECK(F.kind() == StructureKind::frozen);
    const cplx xi(1, 1);
    CHECK(std::abs(F(cplx(9, 9), xi) - 0.2 * xi) < 1e-14);
}

TEST_CASE("plot tables are rectangular csv files") {
    auto dir = fresh_dir("beltrami-plot-test");
    PlotColumns cols = {{"x", {1.0, 2.0}}, {"y", {0.5, 0.25}}};
    auto name = emit_plot_table(dir.string(), "curve.csv", cols);
    CHECK(name == "curve.csv");
    auto text = slurp(dir / "curve.csv");
    CHECK(text.substr(0, 4) == "x,y\n");
    CHECK(text.find("2,0.25") != std::string::npos);

    PlotColumns ragged = {{"x", {1.0, 2.0}}, {"y", {0.5}}};
    CHECK_THROWS_AS(emit_plot_table(dir.string(), "bad.csv", ragged),
                    std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("solve subcommand writes a full report") {
    auto dir = fresh_dir("beltrami-cli-solve");
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"n", 32},
                            {"output_dir", (dir / "out").string()},
                            {"structure",
                             {{"kind", "linear"}, {"mu", 0.5}}}});
    const int rc =
        run_cli("solve --config \"" + cfgp.string() + "\"");
    CHECK(rc == 0);

    auto report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["subcommand"] == "solve");
    CHECK(report["assertions"].is_array());
    CHECK(report["assertions"].size() >= 4);
    for (const auto& a : report["assertions"]) {
        CHECK(a["pass"].get<bool>());
        CHECK(a.contains("bound"));
        CHECK(a.contains("measured"));
    }
    for (const auto& art : report["artifacts"]) {
        CHECK(fs::exists(dir / "out" / art.get<std::string>()));
    }
    CHECK(fs::exists(dir / "out" / "run-config.json"));
    CHECK(fs::exists(dir / "out" / "field_F.csv"));
    CHECK(fs::exists(dir / "out" / "solver_report.json"));
    fs::remove_all(dir);
}

TEST_CASE("equal seeds give byte-identical reports") {
    auto dir = fresh_dir("beltrami-cli-det");
    auto cfgp = dir / "cfg.json";

    write_config(cfgp, json{{"n", 32},
                            {"seed", 11},
                            {"output_dir", (dir / "a").string()}});
    REQUIRE(run_cli("verify --config \"" + cfgp.string() + "\"") == 0);
    write_config(cfgp, json{{"n", 32},
                            {"seed", 11},
                            {"output_dir", (dir / "b").string()}});
    REQUIRE(run_cli("verify --config \"" + cfgp.string() + "\"") == 0);

    auto ra = json::parse(slurp(dir / "a" / "report.json"));
    auto rb = json::parse(slurp(dir / "b" / "report.json"));
    CHECK(ra["assertions"].dump() == rb["assertions"].dump());

    // Same output dir twice: the whole file must match byte for byte.
    write_config(cfgp, json{{"n", 32},
                            {"seed", 11},
                            {"output_dir", (dir / "a").string()}});
    REQUIRE(run_cli("verify --config \"" + cfgp.string() + "\"") == 0);
    auto rc2 = slurp(dir / "a" / "report.json");
    CHECK(rc2 == ra.dump(2) + "\n");
    fs::remove_all(dir);
}

TEST_CASE("flag overrides beat the config file") {
    auto dir = fresh_dir("beltrami-cli-flags");
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"n", 64}, {"output_dir", "ignored"}});
    const int rc = run_cli("verify --config \"" + cfgp.string() +
                           "\" --n 32 --out \"" + (dir / "out").string() +
                           "\"");
    CHECK(rc == 0);
    auto echo = json::parse(slurp(dir / "out" / "run-config.json"));
    CHECK(echo["n"] == 32);
    fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
    auto dir = fresh_dir("beltrami-cli-exit");

    // Unknown subcommand and bad flags are usage errors.
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("solve --no-such-flag") == 2);

    // Unreadable and malformed configs.
    CHECK(run_cli("solve --config /nonexistent/x.json") == 2);
    auto badp = dir / "bad.json";
    {
        std::ofstream out(badp);
        out << "{ not json";
    }
    CHECK(run_cli("solve --config \"" + badp.string() + "\"") == 2);

    auto oddp = dir / "odd.json";
    write_config(oddp, json{{"n", 33}});
    CHECK(run_cli("solve --config \"" + oddp.string() + "\"") == 2);

    auto unk = dir / "unk.json";
    write_config(unk, json{{"grid", 64}});
    CHECK(run_cli("solve --config \"" + unk.string() + "\"") == 2);

    // A failed assertion is exit 1, not a usage error.
    auto capp = dir / "cap.json";
    write_config(capp, json{{"n", 32},
                            {"max_iters", 1},
                            {"output_dir", (dir / "cap").string()}});
    CHECK(run_cli("solve --config \"" + capp.string() + "\"") == 1);
    auto report = json::parse(slurp(dir / "cap" / "report.json"));
    bool saw_fail = false;
    for (const auto& a : report["assertions"])
        if (!a["pass"].get<bool>()) saw_fail = true;
    CHECK(saw_fail);
    fs::remove_all(dir);
}

TEST_CASE("verify and transforms subcommands pass on defaults") {
    auto dir = fresh_dir("beltrami-cli-verify");
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"n", 32},
                            {"output_dir", (dir / "v").string()},
                            {"structure",
                             {{"kind", "linear"}, {"mu", 0.0}}}});
    CHECK(run_cli("verify --config \"" + cfgp.string() + "\"") == 0);

    write_config(cfgp, json{{"n", 64},
                            {"output_dir", (dir / "t").string()}});
    CHECK(run_cli("transforms-test --config \"" + cfgp.string() + "\"") == 0);
    auto report = json::parse(slurp(dir / "t" / "report.json"));
    CHECK(report["subcommand"] == "transforms-test");
    fs::remove_all(dir);
}

TEST_CASE("invert-structure emits a sample table") {
    auto dir = fresh_dir("beltrami-cli-invert");
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"samples", 200},
                            {"seed", 3},
                            {"output_dir", (dir / "inv").string()},
                            {"structure",
                             {{"kind", "linear"}, {"mu", 0.5}}}});
    CHECK(run_cli("invert-structure --config \"" + cfgp.string() + "\"") == 0);
    auto text = slurp(dir / "inv" / "hstar_samples.csv");
    CHECK(text.substr(0, text.find('\n')) ==
          "re_g,im_g,re_xi,im_xi,re_hstar,im_hstar,residual");
    // Header plus one row per sample.
    const auto rows = std::count(text.begin(), text.end(), '\n');
    CHECK(rows == 201);
    fs::remove_all(dir);
}

TEST_CASE("invert-structure accepts a samples file") {
    auto dir = fresh_dir("beltrami-cli-invert-file");
    auto samples = dir / "samples.csv";
    {
        std::ofstream out(samples);
        out << "re_g,im_g,re_xi,im_xi\n";
        out << "0,0,1,0\n0.2,-0.1,0,2\n";
    }
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"samples_file", samples.string()},
                            {"output_dir", (dir / "inv").string()},
                            {"structure",
                             {{"kind", "linear"}, {"mu", 0.5}}}});
    CHECK(run_cli("invert-structure --config \"" + cfgp.string() + "\"") == 0);
    auto text = slurp(dir / "inv" / "hstar_samples.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    fs::remove_all(dir);
}

TEST_CASE("holder subcommand fits a decay table") {
    auto dir = fresh_dir("beltrami-cli-holder");
    auto cfgp = dir / "cfg.json";
    write_config(cfgp, json{{"n", 64},
                            {"output_dir", (dir / "h").string()}});
    CHECK(run_cli("holder --config \"" + cfgp.string() + "\"") == 0);
    CHECK(fs::exists(dir / "h" / "campanato.csv"));
    auto report = json::parse(slurp(dir / "h" / "report.json"));
    CHECK(report["assertions"].size() >= 3);
    fs::remove_all(dir);
}
