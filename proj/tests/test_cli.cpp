#include "oracles.hpp"

#include "insider/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace insider;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Second line, last comma-separated field named `col` of a one-row CSV.
double field(const std::filesystem::path& p, const std::string& col) {
    std::istringstream is(slurp(p));
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    std::vector<std::string> h, r;
    std::string cell;
    for (std::istringstream hs(header); std::getline(hs, cell, ',');) h.push_back(cell);
    for (std::istringstream rs(row); std::getline(rs, cell, ',');) r.push_back(cell);
    for (std::size_t k = 0; k < h.size(); ++k)
        if (h[k] == col) return std::stod(r.at(k));
    throw std::runtime_error("column " + col + " missing");
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists subcommands and flags with units") {
    const auto r = run({"--help"});
    CHECK(r.code == cli::Ok);
    for (const char* s : {"value", "simulate", "martingale", "bsde-linear", "bsde-quadratic", "forward-check",
                          "critical-t0", "figures", "selftest", "--mu", "--sigma", "--varrho", "--T0", "--paths",
                          "--seed", "--config", "--out", "[time]"})
        CHECK(r.out.find(s) != std::string::npos);
    const auto sub = run({"simulate", "--help"});
    CHECK(sub.code == cli::Ok);
    CHECK(sub.out.find("--pi-scale") != std::string::npos);
}

TEST_CASE("usage and validation errors exit 1") {
    auto bad = run({"value", "--bogus"});
    CHECK(bad.code == cli::ValidationError);
    CHECK(bad.err.find("Usage:") != std::string::npos);
    CHECK(bad.err.find("insider --help") != std::string::npos);
    const auto dir = testutil::temp_dir("cli_val");
    auto neg = run({"value", "--sigma", "0", "--out", dir.string()});
    CHECK(neg.code == cli::ValidationError);
    CHECK(neg.err.find("sigma_below_floor") != std::string::npos);
    auto rho = run({"value", "--varrho", "0.0613", "--out", dir.string()});
    CHECK(rho.code == cli::ValidationError);
    CHECK(rho.err.find("varrho_out_of_range") != std::string::npos);
    CHECK(run({"value", "--T0", "0.5", "--out", dir.string()}).code == cli::ValidationError);
    CHECK(run({"value", "--config", "/nonexistent.ini"}).code == cli::ValidationError);
}

TEST_CASE("numerical failures exit 2") {
    const auto dir = testutil::temp_dir("cli_num");
    const auto flat = run({"critical-t0", "--mu", "0", "--out", dir.string()});
    CHECK(flat.code == cli::NumericalFailure);
    CHECK(flat.err.find("bracket_not_straddling") != std::string::npos);
    const auto shoot = run({"bsde-quadratic", "--paths", "2000", "--steps", "10", "--max-iter", "1", "--c2-init",
                            "5", "--out", dir.string()});
    CHECK(shoot.code == cli::NumericalFailure);
    CHECK(shoot.err.find("shooting_not_converged") != std::string::npos);
}

TEST_CASE("value and critical-t0 outputs") {
    const auto dir = testutil::temp_dir("cli_value");
    const auto r = run({"value", "--T0", "2", "--out", dir.string()});
    REQUIRE(r.code == cli::Ok);
    CHECK(r.out.find("command: value") != std::string::npos);
    CHECK(r.out.find("[market]") != std::string::npos);
    const auto csv = slurp(dir / "values.csv");
    CHECK(csv.rfind("regime,base,merton,rent,penalty_adjust,total\n", 0) == 0);
    CHECK(csv.find("0.28678267429077") != std::string::npos);

    REQUIRE(run({"critical-t0", "--out", dir.string()}).code == cli::Ok);
    CHECK(field(dir / "critical_t0.csv", "T0_star") == doctest::Approx(oracle::critical_T0).epsilon(1e-9));
}

TEST_CASE("flags override the config file, which overrides defaults") {
    const auto dir = testutil::temp_dir("cli_cfg");
    {
        std::ofstream cfg(dir / "run.ini");
        cfg << "[market]\nmu0 = 0.2\nsigma = 0.3\n";
    }
    REQUIRE(run({"critical-t0", "--config", (dir / "run.ini").string(), "--out", dir.string()}).code == cli::Ok);
    CHECK(field(dir / "critical_t0.csv", "mu") == 0.2);
    CHECK(field(dir / "critical_t0.csv", "sigma") == 0.3);
    REQUIRE(run({"critical-t0", "--config", (dir / "run.ini").string(), "--mu", "0.1", "--out", dir.string()}).code ==
            cli::Ok);
    CHECK(field(dir / "critical_t0.csv", "mu") == 0.1);
    CHECK(field(dir / "critical_t0.csv", "sigma") == 0.3);
}

TEST_CASE("output directory from the environment") {
    const auto dir = testutil::temp_dir("cli_env");
    ::setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
    const auto r = run({"value"});
    ::unsetenv(cli::kOutDirEnv);
    CHECK(r.code == cli::Ok);
    CHECK(std::filesystem::exists(dir / "values.csv"));
}

TEST_CASE("runs are byte-reproducible and thread-independent") {
    const auto a = testutil::temp_dir("cli_rep_a"), b = testutil::temp_dir("cli_rep_b");
    const std::vector<std::string> args{"simulate", "--T0", "2", "--paths", "3000", "--steps", "40",
                                        "--chunk", "1000", "--dump-paths", "2"};
    auto with = [&](const std::filesystem::path& d, const char* threads) {
        auto v = args;
        v.insert(v.end(), {"--out", d.string(), "--threads", threads});
        return run(v);
    };
    REQUIRE(with(a, "1").code == cli::Ok);
    REQUIRE(with(b, "4").code == cli::Ok);
    CHECK(slurp(a / "simulate.csv") == slurp(b / "simulate.csv"));
    CHECK(slurp(a / "paths.csv") == slurp(b / "paths.csv"));
    CHECK_FALSE(slurp(a / "simulate.csv").empty());
}

TEST_CASE("every subcommand runs on a small budget") {
    const auto dir = testutil::temp_dir("cli_all");
    const std::string d = dir.string();
    CHECK(run({"martingale", "--paths", "2000", "--steps", "20", "--out", d}).code == cli::Ok);
    CHECK(run({"bsde-linear", "--paths", "2000", "--steps", "20", "--out", d}).code == cli::Ok);
    CHECK(run({"bsde-linear", "--T0", "2", "--paths", "2000", "--steps", "20", "--scheme", "direct", "--out", d})
              .code == cli::Ok);
    CHECK(run({"bsde-quadratic", "--T0", "2", "--varrho", "0.030625", "--paths", "2000", "--steps", "20", "--out",
               d}).code == cli::Ok);
    CHECK(run({"forward-check", "--fine-steps", "1024", "--fwd-paths", "20", "--multiples", "4,8", "--out", d}).code ==
          cli::Ok);
    CHECK(run({"figures", "--which", "strategy_lines", "--out", d}).code == cli::Ok);
    for (const char* f : {"martingale.csv", "bsde_linear.csv", "bsde_quadratic.csv", "bsde_quadratic_trace.csv",
                          "forward_check.csv", "strategy_lines.csv"})
        CHECK(std::filesystem::exists(dir / f));
}

TEST_CASE("selftest passes and exits 0") {
    const auto dir = testutil::temp_dir("cli_self");
    const auto r = run({"selftest", "--out", dir.string()});
    CHECK(r.code == cli::Ok);
    const auto csv = slurp(dir / "selftest.csv");
    CHECK(csv.rfind("check,value,reference,tolerance,pass\n", 0) == 0);
    CHECK(csv.find(",0\n") == std::string::npos);
}

}
