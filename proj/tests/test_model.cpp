#include "oracles.hpp"

#include "insider/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace insider;

TEST_SUITE("model") {

TEST_CASE("iota and sigma_tilde examples") {
    auto m = oracle::base_market();
    CHECK(iota(m, 0.0) == doctest::Approx(oracle::iota).epsilon(1e-15));
    CHECK(iota(m, 1.0) == doctest::Approx(oracle::iota).epsilon(1e-15));
    m.mu0 = 0.08;
    CHECK(iota(m, 0.5) == doctest::Approx(oracle::iota_mu008).epsilon(1e-15));

    m = oracle::base_market();
    CHECK(sigma_tilde(m, 0.3) == 0.35);
    m.varrho = 0.06;
    CHECK(sigma_tilde(m, 0.3) == doctest::Approx(oracle::sigma_tilde_rho006).epsilon(1e-13));
    m.varrho = 0.35 * 0.35 / 4.0;
    CHECK(sigma_tilde(m, 0.3) == doctest::Approx(0.175).epsilon(1e-15));
}

TEST_CASE("time outside [0, T] is a domain error") {
    const auto m = oracle::base_market();
    CHECK(testutil::error_code([&] { iota(m, -0.1); }) == "time_out_of_range");
    CHECK(testutil::error_code([&] { sigma_tilde(m, 1.5); }) == "time_out_of_range");
    CHECK(testutil::error_kind([&] { iota(m, 2.0); }) == ErrorKind::Domain);
}

TEST_CASE("phi_norm_sq") {
    InsiderSpec ins = oracle::enlarged();
    CHECK(phi_norm_sq(ins, 0.0, 2.0) == 2.0);
    CHECK(phi_norm_sq(ins, 0.5, 2.0) == 1.5);
    ins.phi_weight = PiecewiseConstant({0.0, 1.0}, {2.0, 1.0});
    CHECK(phi_norm_sq(ins, 0.0, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(phi_norm_sq(ins, 0.5, 1.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(testutil::error_code([&] { phi_norm_sq(ins, 1.0, 0.5); }) == "interval_reversed");
}

TEST_CASE("piecewise integrals are exact and right-continuous") {
    const PiecewiseConstant f({0.0, 0.25, 0.5}, {1.0, -2.0, 3.0});
    CHECK(f(0.0) == 1.0);
    CHECK(f(0.25) == -2.0);
    CHECK(f(0.4999) == -2.0);
    CHECK(f(10.0) == 3.0);
    CHECK(f.integral(0.0, 1.0) == doctest::Approx(0.25 - 0.5 + 1.5).epsilon(1e-15));
    CHECK(f.integral_sq(0.1, 0.6) == doctest::Approx(0.15 + 1.0 + 0.9).epsilon(1e-15));
    CHECK(f.min_on(0.0, 1.0) == -2.0);
    CHECK(f.max_on(0.0, 0.4) == 1.0);
}

TEST_CASE("integrate_segments matches a fine left-point sum") {
    MarketParams m = oracle::base_market();
    m.mu0 = PiecewiseConstant({0.0, 0.25, 0.75}, {0.10, 0.20, 0.05});
    m.sigma = PiecewiseConstant({0.0, 0.5}, {0.3, 0.4});
    m.r = PiecewiseConstant({0.0, 0.625}, {0.01, 0.02});
    const double exact = integrate_segments(m, 0.0, m.T, [&](double t) { return std::pow(iota(m, t), 2); });
    // 2^12 steps hit every breakpoint exactly.
    const int n = 4096;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = m.T * k / n;
        sum += std::pow(iota(m, t), 2) * m.T / n;
    }
    CHECK(exact == doctest::Approx(sum).epsilon(1e-13));
    CHECK(m.breakpoints() == std::vector<double>{0.25, 0.5, 0.625, 0.75});
    CHECK_FALSE(m.is_constant());
}

TEST_CASE("validation codes") {
    auto code = [](MarketParams m) { return testutil::error_code([&] { validate(m); }); };
    auto m = oracle::base_market();
    CHECK(code(m) == "");

    auto bad = m;
    bad.T = 0.0;
    CHECK(code(bad) == "horizon_nonpositive");
    bad = m;
    bad.X0 = -1.0;
    CHECK(code(bad) == "x0_nonpositive");
    bad = m;
    bad.eps = 0.0;
    CHECK(code(bad) == "eps_nonpositive");
    bad = m;
    bad.sigma = PiecewiseConstant({0.0, 0.5}, {0.3, 1e-9});
    CHECK(code(bad) == "sigma_below_floor");
    bad = m;
    bad.varrho = -0.01;
    CHECK(code(bad) == "varrho_out_of_range");
    bad = m;
    bad.varrho = 0.5 * 0.35 * 0.35;
    CHECK(code(bad) == "varrho_out_of_range");
    bad = m;
    bad.varrho = 0.5 * 0.35 * 0.35 * (1.0 - 1e-9);
    CHECK(code(bad) == "");

    CHECK(testutil::error_code([] { PiecewiseConstant({0.0, 0.5}, {1.0}); }) == "breakpoints_malformed");
    CHECK(testutil::error_code([] { PiecewiseConstant({0.1}, {1.0}); }) == "breakpoints_malformed");
    CHECK(testutil::error_code([] { PiecewiseConstant({0.0, 0.5, 0.5}, {1.0, 2.0, 3.0}); }) ==
          "breakpoints_not_increasing");
    CHECK(testutil::error_code([] { PiecewiseConstant(std::nan("")); }) == "coefficient_not_finite");

    InsiderSpec ins = oracle::enlarged(1.0);
    CHECK(testutil::error_code([&] { validate(ins, 1.0); }) == "t0_not_after_t");
    ins = oracle::enlarged(2.0);
    ins.phi_weight = PiecewiseConstant({0.0, 1.0}, {1.0, 0.0});
    CHECK(testutil::error_code([&] { validate(ins, 1.0); }) == "phi_tail_norm_zero");
    CHECK(testutil::error_code([&] { validate(InsiderSpec{}, 1.0); }) == "");

    ScenarioConfig c;
    c.market = m;
    c.n_steps = 1;
    CHECK(testutil::error_code([&] { validate(c); }) == "n_steps_too_small");
    c.n_steps = 10;
    c.n_steps_tail = -1;
    CHECK(testutil::error_code([&] { validate(c); }) == "n_steps_tail_negative");
    c.n_steps_tail = 0;
    c.n_paths = 0;
    CHECK(testutil::error_code([&] { validate(c); }) == "n_paths_zero");
    c.n_paths = 1;
    CHECK(testutil::error_code([&] { validate(c); }) == "");
}

TEST_CASE("small_trader and insider kinds") {
    auto m = oracle::base_market();
    CHECK(m.small_trader());
    m.varrho = PiecewiseConstant({0.0, 0.5}, {0.0, 0.01});
    CHECK_FALSE(m.small_trader());

    CHECK(insider_kind_from_string("none") == InsiderKind::NoInsider);
    CHECK(insider_kind_from_string("InitialEnlargement") == InsiderKind::InitialEnlargement);
    CHECK(insider_kind_from_string(to_string(InsiderKind::InitialEnlargement)) == InsiderKind::InitialEnlargement);
    CHECK(testutil::error_code([] { insider_kind_from_string("oracle"); }) == "unknown_insider_kind");
    CHECK(oracle::enlarged().unit_weight());
}

}
