#include "oracles.hpp"

#include "insider/config.hpp"
#include "insider/csv.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace insider;

TEST_SUITE("config") {

TEST_CASE("piecewise coefficient syntax") {
    const auto c = parse_piecewise(" 0.15 ");
    CHECK(c.is_constant());
    CHECK(c(3.0) == 0.15);
    const auto p = parse_piecewise("0:0.1, 0.5:0.2");
    CHECK(p(0.49) == 0.1);
    CHECK(p(0.5) == 0.2);
    CHECK(format_piecewise(p) == "0:0.1, 0.5:0.2");
    CHECK(format_piecewise(c) == "0.15");
    CHECK(testutil::error_code([] { parse_piecewise("0.1:0.2"); }) == "breakpoints_malformed");
    CHECK(testutil::error_code([] { parse_piecewise("0:0.1, 0.5"); }) == "breakpoints_malformed");
    CHECK(testutil::error_code([] { parse_piecewise("abc"); }) == "config_not_a_number");
}

TEST_CASE("INI parsing overrides only present keys") {
    std::istringstream is("[market]\nmu0 = 0.1\nsigma = 0:0.3, 0.5:0.4\n[insider]\nkind = enlargement\nT0 = 3\n"
                          "[run]\nrobust = false\nn_paths = 500\nseed = 7\nthreads = 2\n");
    RunSettings base;
    base.scenario = default_scenario();
    const auto s = parse_config(is, base);
    CHECK(s.scenario.market.mu0(0.0) == 0.1);
    CHECK(s.scenario.market.sigma(0.7) == 0.4);
    CHECK(s.scenario.market.T == 1.0);
    CHECK(s.scenario.insider.enlarged());
    CHECK(s.scenario.insider.T0 == 3.0);
    CHECK_FALSE(s.scenario.robust);
    CHECK(s.scenario.n_paths == 500);
    CHECK(s.scenario.n_steps == 200);
    CHECK(s.scenario.seed == 7);
    CHECK(s.threads == 2);
}

TEST_CASE("INI errors") {
    RunSettings base;
    auto code = [&](const std::string& text) {
        std::istringstream is(text);
        return testutil::error_code([&] { parse_config(is, base); });
    };
    CHECK(code("[market]\nmu = 0.1\n") == "unknown_config_key");
    CHECK(code("[markets]\nmu0 = 0.1\n") == "unknown_config_section");
    CHECK(code("[market]\nT = one\n") == "config_not_a_number");
    CHECK(code("[run]\nrobust = maybe\n") == "config_not_a_bool");
    CHECK(code("[run]\nn_paths = 1.5\n") == "config_not_an_integer");
    CHECK(code("[insider]\nkind = psychic\n") == "unknown_insider_kind");
    CHECK(code("mu0 = 0.1\n") == "config_key_outside_section");
    CHECK(code("[market\n") == "config_syntax");
    CHECK(testutil::error_code([&] { load_config("/nonexistent/insider.ini", base); }) == "config_unreadable");
}

TEST_CASE("written config parses back to the same settings") {
    RunSettings s;
    s.scenario = default_scenario();
    s.scenario.market.r = parse_piecewise("0:0.01, 0.25:0.02");
    s.scenario.market.varrho = 0.0306;
    s.scenario.insider = oracle::enlarged(2.5);
    s.scenario.insider.phi_weight = parse_piecewise("0:2, 1:1");
    s.scenario.n_steps = 123;
    s.scenario.seed = 99;
    s.threads = 3;
    std::ostringstream os;
    write_config(os, s);
    std::istringstream is(os.str());
    const auto back = parse_config(is, RunSettings{});
    std::ostringstream again;
    write_config(again, back);
    CHECK(again.str() == os.str());
    CHECK(back.scenario.market.varrho(0.0) == 0.0306);
}

}

TEST_SUITE("config") {

TEST_CASE("shortest round-trip doubles") {
    CHECK(format_double(0.15) == "0.15");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    for (double x : {oracle::iota, oracle::critical_T0, 1e-300, -2.5e17, std::numeric_limits<double>::max()})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("csv quoting and width") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    std::ostringstream os;
    CsvWriter w(os, {"a", "b"});
    w.row(1, 0.5);
    CHECK(os.str() == "a,b\n1,0.5\n");
    CHECK(testutil::error_code([&] { w.row(1); }) == "csv_width");

    Table t;
    t.header = {"x", "y"};
    t.rows = {{1.0, 2.0}};
    std::ostringstream ts;
    t.write(ts);
    CHECK(ts.str() == "x,y\n1,2\n");
    CHECK(t.column("y") == 1);
}

}
