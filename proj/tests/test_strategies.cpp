#include "oracles.hpp"

#include "insider/paths.hpp"
#include "insider/strategies.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace insider;

namespace {

// Unit-weight state with W_t = w, W_T0 = wT0.
PathState unit_state(const InsiderSpec& ins, double w, double wT0, double t) {
    PathState s;
    s.W_t = s.B_t = w;
    s.W_T0 = s.Y0 = wT0;
    s.phi = information_drift_at(ins, s.Y0, s.B_t, t);
    return s;
}

double half_identity(const MarketParams& m, double t, double pi, double phi, double theta) {
    const double sig = m.sigma(t);
    return m.mu0(t) + 2.0 * m.varrho(t) * pi - m.r(t) - sig * sig * pi + sig * phi + sig * theta;
}

} // namespace

TEST_SUITE("strategies") {

TEST_CASE("uninformed robust trader") {
    auto m = oracle::base_market();
    CHECK(pi_no_insider_robust(m, 0.3) == doctest::Approx(oracle::pi_no_insider_robust).epsilon(1e-15));
    CHECK(theta_no_insider_robust(m, 0.3) == doctest::Approx(oracle::theta_no_insider_robust).epsilon(1e-15));
    // Half of the Merton fraction.
    CHECK(pi_no_insider_robust(m, 0.3) == doctest::Approx(0.5 * pi_no_insider_nonrobust(m, 0.3)).epsilon(1e-15));
    CHECK(theta_no_insider_robust(m, 0.3) ==
          doctest::Approx(theta_from_pi(m, 0.0, pi_no_insider_robust(m, 0.3), 0.3)).epsilon(1e-15));
    m.varrho = 0.01;
    CHECK(testutil::error_code([&] { pi_no_insider_robust(m, 0.3); }) == "requires_small_trader");
    m = oracle::base_market();
    m.mu0 = 0.0;
    CHECK(pi_no_insider_robust(m, 0.3) == 0.0);
    CHECK(theta_no_insider_robust(m, 0.3) == 0.0);
}

TEST_CASE("small robust insider example") {
    const auto m = oracle::base_market();
    const auto ins = oracle::enlarged();
    const auto s = unit_state(ins, 0.0, 1.0, 0.5);
    CHECK(pi_small_insider_robust(m, ins, s, 0.5) == doctest::Approx(oracle::pi_small_example).epsilon(1e-14));
    CHECK(theta_small_insider_robust(m, ins, s, 0.5) ==
          doctest::Approx(oracle::theta_small_example).epsilon(1e-14));
    CHECK(slope_small_insider_robust(m, ins, 0.5) == doctest::Approx(oracle::slope_small_example).epsilon(1e-14));

    auto flat = m;
    flat.mu0 = 0.0;
    const auto z = unit_state(ins, 0.4, 0.4, 0.5);
    CHECK(pi_small_insider_robust(flat, ins, z, 0.5) == 0.0);
    CHECK(theta_small_insider_robust(flat, ins, z, 0.5) == 0.0);

    CHECK(testutil::error_code([&] { pi_small_insider_robust(m, ins, s, 1.0); }) == "time_out_of_range");
    CHECK(testutil::error_code([&] { pi_small_insider_robust(m, InsiderSpec{}, s, 0.5); }) ==
          "requires_enlargement");
}

TEST_CASE("large non-robust insider") {
    auto m = oracle::large_market();
    const auto ins = oracle::enlarged();
    const auto none = unit_state(ins, 0.2, 0.2, 0.5);
    CHECK(pi_large_insider_nonrobust(m, ins, none, 0.5) ==
          doctest::Approx(oracle::pi_large_first_term).epsilon(1e-14));
    CHECK(pi_large_insider_nonrobust(m, ins, none, 0.5) ==
          doctest::Approx(pi_no_insider_nonrobust(m, 0.5)).epsilon(1e-15));
    CHECK(slope_large_insider_nonrobust(m, ins, 0.5) == doctest::Approx(-1.0 / (0.175 * 1.5)).epsilon(1e-14));

    auto w = ins;
    w.phi_weight = PiecewiseConstant({0.0, 0.5}, {1.0, 2.0});
    CHECK(testutil::error_code([&] { pi_large_insider_nonrobust(m, w, none, 0.2); }) == "unsupported_phi");
}

TEST_CASE("regime lattice") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    const auto m = oracle::base_market();
    const auto ins = oracle::enlarged();
    for (int k = 0; k < 200; ++k) {
        const double t = 0.99 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double w = std::sqrt(t) * n01(rng);
        const auto s = unit_state(ins, w, w + std::sqrt(2.0 - t) * n01(rng), t);
        // varrho = 0 collapses large onto small non-robust.
        CHECK(pi_large_insider_nonrobust(m, ins, s, t) ==
              doctest::Approx(pi_small_insider_nonrobust(m, s, t)).epsilon(1e-13));
    }

    // Zero information weight before T removes the signal.
    InsiderSpec blind = ins;
    blind.phi_weight = PiecewiseConstant({0.0, 1.0}, {0.0, 1.0});
    for (double t : {0.0, 0.3, 0.9}) {
        PathState s;
        s.Y0 = 1.7;
        s.B_t = 0.0;
        CHECK(pi_small_insider_robust(m, blind, s, t) == doctest::Approx(pi_no_insider_robust(m, t)).epsilon(1e-15));
        CHECK(theta_small_insider_robust(m, blind, s, t) ==
              doctest::Approx(theta_no_insider_robust(m, t)).epsilon(1e-15));
    }
}

TEST_CASE("strategies are affine in W_t with the analytic slopes") {
    const auto ins = oracle::enlarged();
    const double h = 1e-3;
    for (double rho : {0.0, 0.35 * 0.35 / 4.0}) {
        auto m = oracle::base_market();
        m.varrho = rho;
        for (double t : {0.0, 0.25, 0.5, 0.9}) {
            for (double w : {-1.0, 0.0, 0.8}) {
                auto at = [&](double x) { return unit_state(ins, x, 1.0, t); };
                const double fd_large = (pi_large_insider_nonrobust(m, ins, at(w + h), t) -
                                         pi_large_insider_nonrobust(m, ins, at(w - h), t)) / (2 * h);
                CHECK(fd_large == doctest::Approx(slope_large_insider_nonrobust(m, ins, t)).epsilon(1e-9));
                if (rho == 0.0) {
                    const double fd_small = (pi_small_insider_robust(m, ins, at(w + h), t) -
                                             pi_small_insider_robust(m, ins, at(w - h), t)) / (2 * h);
                    CHECK(fd_small == doctest::Approx(slope_small_insider_robust(m, ins, t)).epsilon(1e-9));
                    const double fd_nr = (pi_small_insider_nonrobust(m, at(w + h), t) -
                                          pi_small_insider_nonrobust(m, at(w - h), t)) / (2 * h);
                    CHECK(fd_nr == doctest::Approx(slope_small_insider_nonrobust(m, ins, t)).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("half-characterization identity") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    auto ins = oracle::enlarged();
    auto m = oracle::base_market();
    m.r = 0.02;
    for (int k = 0; k < 100; ++k) {
        const double t = 0.99 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto s = unit_state(ins, n01(rng), n01(rng), t);
        const double pi_r = pi_small_insider_robust(m, ins, s, t);
        const double th_r = theta_small_insider_robust(m, ins, s, t);
        CHECK(std::abs(half_identity(m, t, pi_r, s.phi, th_r)) < 1e-12);
        CHECK(std::abs(half_identity(m, t, pi_no_insider_robust(m, t), 0.0, theta_no_insider_robust(m, t))) < 1e-12);

        auto big = m;
        big.varrho = 0.02;
        const double pi_l = pi_large_insider_nonrobust(big, ins, s, t);
        CHECK(std::abs(half_identity(big, t, pi_l, s.phi, theta_from_pi(big, s.phi, pi_l, t))) < 1e-12);
    }

    // Non-unit weight through a batch.
    ScenarioConfig c = default_scenario();
    c.insider = ins;
    c.insider.phi_weight = PiecewiseConstant({0.0, 0.5, 1.5}, {2.0, 1.0, 0.5});
    c.n_steps = 20;
    c.n_paths = 30;
    const auto b = sample_paths(c);
    const auto prof = build_profile(StrategyKind::SmallInsiderRobust, b, c.market, c.insider);
    for (std::size_t p = 0; p < b.n_paths; ++p)
        for (std::size_t i = 0; i < b.steps(); ++i) {
            const double t = b.grid.t(i);
            const double pi = prof.pi[p * b.steps() + i];
            const double th = prof.theta[p * b.steps() + i];
            CHECK(th == doctest::Approx(theta_from_pi(c.market, b.phi_path(p)[i], pi, t)).epsilon(1e-12));
        }
}

TEST_CASE("profiles") {
    ScenarioConfig c = default_scenario();
    c.insider = oracle::enlarged();
    c.n_steps = 10;
    c.n_paths = 4;
    const auto b = sample_paths(c);
    CHECK(testutil::error_code([&] { build_profile(StrategyKind::LargeInsiderRobust, b, c.market, c.insider); }) ==
          "no_closed_form");
    CHECK(testutil::error_code([&] {
              build_profile(StrategyKind::SmallInsiderNonRobust, b, c.market, InsiderSpec{});
          }) == "requires_enlargement");
    for (auto kind : {StrategyKind::NoInsiderNonRobust, StrategyKind::SmallInsiderNonRobust,
                      StrategyKind::LargeInsiderNonRobust}) {
        const auto prof = build_profile(kind, b, c.market, c.insider);
        CHECK(prof.pi.size() == 40);
        for (double th : prof.theta) CHECK(th == 0.0);
        CHECK_FALSE(is_robust(kind));
    }
    const auto prof = build_profile(StrategyKind::NoInsiderRobust, b, c.market, c.insider);
    for (double pi : prof.pi) CHECK(pi == doctest::Approx(oracle::pi_no_insider_robust).epsilon(1e-15));

    for (auto kind : {StrategyKind::NoInsiderRobust, StrategyKind::NoInsiderNonRobust,
                      StrategyKind::SmallInsiderRobust, StrategyKind::SmallInsiderNonRobust,
                      StrategyKind::LargeInsiderNonRobust, StrategyKind::LargeInsiderRobust})
        CHECK(strategy_kind_from_string(to_string(kind)) == kind);
    CHECK(testutil::error_code([] { strategy_kind_from_string("Oracle"); }) == "unknown_strategy_kind");
}

}
