#include "hawkes/commands.hpp"
#include "hawkes/config.hpp"
#include "hawkes/csv.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace hawkes;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hawkes_commands_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Overrides to(const fs::path& dir) {
    Overrides ov;
    ov.out_dir = dir.string();
    ov.threads = 1;
    return ov;
}

std::string error_of(const std::function<void()>& run) {
    try {
        run();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

const std::string kLinear = R"(
[model]
builtin = linear_hawkes
lambda0 = 1
[driver]
horizon = 5
lambda_max = 40
[kernel]
type = expsum
eta = 0.5
beta = 1
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = Config::parse("out = here # trailing\n[a.b]\nx = 1, 2.5 ,3\nflag = yes\n; note\nn = 7\n", "t.cfg");
    CHECK(cfg.section("run").get_string("out") == "here");
    CHECK(cfg.section("a.b").get_doubles("x") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(cfg.section("a.b").get_bool("flag", false));
    CHECK(cfg.section("a.b").get_uint("n") == 7);
    CHECK(cfg.section("a.b").get_double("missing", 4.0) == 4.0);
    CHECK(cfg.section("a.b").get_double("n") == 7.0);

    CHECK(error_of([] { Config::parse("[a]\nx 1\n", "t.cfg"); }).find("t.cfg:2") == 0);
    CHECK(error_of([] { Config::parse("[a]\nx = 1\nx = 2\n", "t.cfg"); }).find("duplicate key") != std::string::npos);
    CHECK(error_of([] { Config::parse("[a\n", "t.cfg"); }).find("t.cfg:1") == 0);
    const auto bad = Config::parse("[a]\nx = 1.5.2\nn = -3\n", "t.cfg");
    CHECK(error_of([&] { static_cast<void>(bad.section("a").get_double("x")); }).find("t.cfg [a] x (line 2)") == 0);
    CHECK(error_of([&] { static_cast<void>(bad.section("a").get_uint("n")); }).find("nonnegative integer") != std::string::npos);
    CHECK(error_of([&] { static_cast<void>(bad.section("kernel")); }) == "t.cfg: missing [kernel] block");
    CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("help reference lists every key") {
    const std::string ref = config_reference();
    for (const auto& k : config_keys()) {
        CHECK(ref.find("[" + k.section + "]") != std::string::npos);
        CHECK(ref.find("  " + k.key) != std::string::npos);
        CHECK(!k.precondition.empty());
    }
}

TEST_CASE("shipped configs use documented keys only") {
    for (const char* name : {"figure1.cfg", "figure2.cfg", "portfolio.cfg"}) {
        const auto cfg = Config::load(std::string(HAWKES_SOURCE_DIR) + "/configs/" + name);
        for (const auto& section : cfg.section_names()) {
            const std::string doc = section.rfind("kernels.", 0) == 0 ? "kernel" : section;
            for (const auto& key : cfg.section(section).keys()) {
                bool found = false;
                for (const auto& k : config_keys()) found = found || (k.section == doc && k.key == key);
                CHECK_MESSAGE(found, name << " [" << section << "] " << key);
            }
        }
    }
}

TEST_CASE("model and kernel blocks") {
    const auto m = model_from_config(Config::parse("[model]\nbuiltin = affine\npsi = capped\npsi_cap = 3\nsigma = 0.5\n", "m").section("model"));
    CHECK(m.psi(10.0) == 3.0);
    CHECK(m.sigma(0.0, 1.0) == 0.5);
    CHECK_THROWS_AS(model_from_config(Config::parse("[model]\nbuiltin = nope\n", "m").section("model")), ConfigError);
    CHECK_THROWS_AS(model_from_config(Config::parse("[model]\nbuiltin = linear_hawkes\nlambda0 = -1\n", "m").section("model")),
                    ConfigError);

    const auto k = kernel_from_config(Config::parse("[kernel]\ntype = ladder\neta = 1, 2\nbeta_base = 0.5\nscale = 2\n", "k").section("kernel"), "");
    CHECK(k(0.0) == doctest::Approx(6.0));
    const auto pl = kernel_from_config(Config::parse("[kernel]\ntype = builtin\nname = power_law\nexponent = 3\n", "k").section("kernel"), "");
    CHECK(l1_norm(pl) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(kernel_from_config(Config::parse("[kernel]\ntype = expsum\neta = 1\nbeta = -1\n", "k").section("kernel"), ""),
                    ConfigError);
    CHECK_THROWS_AS(kernel_from_config(Config::parse("[kernel]\ntype = builtin\nname = power_law\nexponent = 1\n", "k").section("kernel"), ""),
                    ConfigError);

    const auto dir = scratch_dir("tabulated");
    std::ofstream(dir / "phi.csv") << "t,phi\n0,1\n1,0.5\n2,0\n";
    const auto tab = kernel_from_config(Config::parse("[kernel]\ntype = tabulated\nfile = phi.csv\n", "k").section("kernel"), dir.string());
    CHECK(tab(0.5) == doctest::Approx(0.75));
    CHECK(tab(3.0) == 0.0);
}

TEST_CASE("fit-kernel command") {
    const auto dir = scratch_dir("fit");
    std::ostringstream log;
    const auto missing = error_of([&] { cmd_fit(Config::parse("[fit]\nn_list = 2\n", "nokernel.cfg"), to(dir), log); });
    CHECK(missing == "nokernel.cfg: missing [kernel] block");
    CHECK_THROWS_AS(cmd_fit(Config::parse("[kernel]\ntype = expsum\neta = 1\nbeta = 1\n[fit]\nn_list =\n", "c"), to(dir), log),
                    ConfigError);
    CHECK_THROWS_AS(cmd_fit(Config::parse("[kernel]\ntype = expsum\neta = 1\nbeta = 1\n[fit]\nn_list = 1\ntypo = 3\n", "c"), to(dir), log),
                    ConfigError);

    const auto cfg = Config::parse("[kernel]\ntype = ladder\neta = 0.4, -0.2\nbeta_base = 0.5\n[fit]\nn_list = 2\nmethod = l2\ncurve_end = 1\n", "own.cfg");
    CHECK(cmd_fit(cfg, to(dir), log) == exit_codes::ok);
    const auto rows = csv::read_numeric((dir / "fit.csv").string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][2] == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(rows[0][4] < 1e-12);
    const auto curves = csv::read_numeric((dir / "kernel_curves.csv").string());
    CHECK(curves.size() == 101);
    CHECK(curves.back()[0] == doctest::Approx(1.0));
}

TEST_CASE("check command exit codes") {
    const auto dir = scratch_dir("check");
    std::ostringstream log;
    auto run = [&](const std::string& scale) {
        return cmd_check(Config::parse(kLinear + "scale = " + scale + "\n", "lh.cfg"), to(dir), log);
    };
    CHECK(run("1") == exit_codes::ok);
    CHECK(run("4") == exit_codes::assumption_fail);
    CHECK(run("1.98") == exit_codes::assumption_unknown);
    CHECK(slurp(dir / "check.csv").find("verdict_overall,UNKNOWN") != std::string::npos);
    CHECK(fs::exists(dir / "check.txt"));
}

TEST_CASE("simulate command") {
    const auto a = scratch_dir("sim_a");
    const auto b = scratch_dir("sim_b");
    std::ostringstream log;
    const auto cfg = Config::parse(kLinear + "[kernels.flat]\ntype = expsum\neta = 0\nbeta = 1\n[simulate]\nkernels = kernel, flat\n", "sim.cfg");
    CHECK(cmd_simulate(cfg, to(a), log) == exit_codes::ok);
    CHECK(cmd_simulate(cfg, to(b), log) == exit_codes::ok);
    for (const char* f : {"path_kernel.csv", "path_flat.csv", "jumps_kernel.csv", "jumps_flat.csv", "simulate_summary.csv"})
        CHECK(slurp(a / f) == slurp(b / f));

    const auto flat = csv::read_numeric((a / "path_flat.csv").string());
    for (const auto& row : flat) CHECK(row[2] == 1.0);

    const auto tight = Config::parse(kLinear + "[simulate]\nengine = lifted\n", "sim.cfg");
    Overrides ov = to(a);
    ov.seed = 3;
    CHECK(cmd_simulate(tight, ov, log) == exit_codes::ok);
    CHECK(slurp(a / "path_kernel.csv").find("# seed = 3") != std::string::npos);
}

TEST_CASE("converge command") {
    const auto dir = scratch_dir("converge");
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_converge(Config::parse(kLinear + "[converge]\nn_list =\n", "c.cfg"), to(dir), log), ConfigError);

    const auto one = Config::parse(kLinear + "[converge]\nn_list = 1\nn_paths = 1\n", "c.cfg");
    CHECK(cmd_converge(one, to(dir), log) == exit_codes::ok);
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK(slurp(dir / "convergence.csv").find(",NA,") != std::string::npos);

    const auto cfg = Config::parse(kLinear + "[converge]\nn_list = 1, 2\nn_paths = 40\n", "c.cfg");
    const auto other = scratch_dir("converge_threads");
    Overrides ov = to(other);
    ov.threads = 3;
    CHECK(cmd_converge(cfg, to(dir), log) == exit_codes::ok);
    CHECK(cmd_converge(cfg, ov, log) == exit_codes::ok);
    CHECK(slurp(dir / "convergence.csv") == slurp(other / "convergence.csv"));
    CHECK(slurp(dir / "convergence_samples.csv") == slurp(other / "convergence_samples.csv"));
}

TEST_CASE("portfolio command") {
    const auto dir = scratch_dir("portfolio");
    std::ostringstream log;
    const std::string base = "[kernel]\ntype = expsum\neta = 0.25, 0.5\nbeta = 1, 2\n"
                             "[portfolio]\nn_paths = 400\ndt = 0.02\n";
    CHECK_THROWS_AS(cmd_portfolio(Config::parse(base + "[market]\nrho = 0\n", "p.cfg"), to(dir), log), ConfigError);
    CHECK_THROWS_AS(cmd_portfolio(Config::parse(base + "[market]\ngamma = -1\n", "p.cfg"), to(dir), log), ConfigError);

    CHECK(cmd_portfolio(Config::parse(base + "[market]\ngamma = 0\n", "p.cfg"), to(dir), log) == exit_codes::ok);
    const std::string table = slurp(dir / "portfolio.csv");
    CHECK(table.find("n,V0n,se,tail_bound,omega_star_at_lambda0") != std::string::npos);
    const std::string policies = slurp(dir / "portfolio_policies.csv");
    CHECK(policies.find("optimal,") != std::string::npos);
    CHECK(policies.find("matches_closed_form") != std::string::npos);
    CHECK(policies.find("matches_merton") != std::string::npos);
    CHECK(policies.find("FAIL") == std::string::npos);
}
