#include "oracles.hpp"

#include "insider/analysis.hpp"

#include <doctest.h>

#include <cmath>

using namespace insider;

TEST_SUITE("analysis") {

TEST_CASE("closed-form values") {
    const auto m = oracle::base_market();
    const auto big = oracle::large_market();
    const auto ins = oracle::enlarged();
    CHECK(value_no_insider_robust(m).total == doctest::Approx(oracle::value_no_insider_robust).epsilon(1e-13));
    CHECK(value_no_insider_nonrobust(m).total == doctest::Approx(oracle::value_no_insider_nonrobust).epsilon(1e-13));
    CHECK(value_no_insider_nonrobust(big).total ==
          doctest::Approx(oracle::value_no_insider_nonrobust_large).epsilon(1e-13));
    CHECK(value_small_insider_robust(m, ins).total ==
          doctest::Approx(oracle::value_small_insider_robust).epsilon(1e-13));
    CHECK(value_large_insider_nonrobust(big, ins).total ==
          doctest::Approx(oracle::value_large_insider_nonrobust).epsilon(1e-13));
    CHECK(value_small_insider_nonrobust(m, ins).total ==
          doctest::Approx(oracle::value_small_insider_nonrobust).epsilon(1e-13));
    // The small non-robust insider ignores impact.
    CHECK(value_small_insider_nonrobust(big, ins).total == value_small_insider_nonrobust(m, ins).total);

    auto flat = m;
    flat.mu0 = 0.0;
    const auto v = value_small_insider_robust(flat, ins);
    CHECK(v.total - v.base == doctest::Approx(oracle::value_mu_eq_r_rent).epsilon(1e-13));

    for (const auto& b : {value_no_insider_robust(m), value_small_insider_robust(m, ins),
                          value_large_insider_nonrobust(big, ins)})
        CHECK(b.total == doctest::Approx(b.base + b.merton + b.rent + b.penalty_adjust).epsilon(1e-15));

    CHECK(testutil::error_code([&] { value_no_insider_robust(big); }) == "requires_small_trader");
    CHECK(testutil::error_code([&] { value_small_insider_robust(m, InsiderSpec{}); }) == "requires_enlargement");
    CHECK(testutil::error_code([&] { value_small_insider_robust(m, oracle::enlarged(1.0)); }) == "t0_not_after_t");
}

TEST_CASE("base term carries ln X0 and the short rate") {
    auto m = oracle::base_market();
    m.X0 = 3.0;
    m.r = PiecewiseConstant({0.0, 0.5}, {0.01, 0.03});
    m.mu0 = PiecewiseConstant({0.0, 0.5}, {0.11, 0.13});
    const auto v = value_no_insider_nonrobust(m);
    CHECK(v.base == doctest::Approx(std::log(3.0) + 0.02).epsilon(1e-15));
    // iota = 0.1 / 0.35 on both halves.
    CHECK(v.merton == doctest::Approx(0.5 * std::pow(0.1 / 0.35, 2)).epsilon(1e-14));
    CHECK(integral_iota(m) == doctest::Approx(0.1 / 0.35).epsilon(1e-14));
}

TEST_CASE("piecewise rent matches numerical quadrature") {
    auto m = oracle::base_market();
    m.varrho = PiecewiseConstant({0.0, 0.3, 0.7}, {0.0, 0.02, 0.05});
    const auto ins = oracle::enlarged(1.5);
    const int n = 1000000;
    double q = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        q += 0.5 * m.sigma(t) / sigma_tilde(m, t) / (1.5 - t) / n;
    }
    CHECK(value_large_insider_nonrobust(m, ins).rent == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("long anticipation limits") {
    const auto m = oracle::base_market();
    const auto big = oracle::large_market();
    const auto far = oracle::enlarged(1e8);
    CHECK(std::abs(value_small_insider_robust(m, far).total - oracle::value_no_insider_robust) < 1e-6);
    CHECK(std::abs(value_large_insider_nonrobust(big, far).total - oracle::value_no_insider_nonrobust_large) < 1e-6);

    // Rents decay like 1/T0.
    const double T0 = 100.0;
    const auto ins = oracle::enlarged(T0);
    const double i = oracle::iota;
    const double small_lead = (0.5 + 0.25 * i * i) / (2.0 * T0);
    CHECK(value_small_insider_robust(m, ins).rent / small_lead == doctest::Approx(1.0).epsilon(0.01));
    const double k = 0.35 / 0.175;
    CHECK(value_large_insider_nonrobust(big, ins).rent / (0.5 * k / T0) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("regime ordering and monotonicity over the sweep") {
    const FigureSweep sweep;
    for (double mu : sweep.mus)
        for (double sigma : sweep.sigmas) {
            auto m = oracle::base_market();
            m.mu0 = mu;
            m.sigma = sigma;
            auto big = m;
            big.varrho = 0.25 * sigma * sigma;
            double prev_sr = INFINITY, prev_ln = INFINITY;
            for (double T0 : sweep.T0s) {
                const auto ins = oracle::enlarged(T0);
                const double sr = value_small_insider_robust(m, ins).total;
                const double sn = value_small_insider_nonrobust(m, ins).total;
                const double ln = value_large_insider_nonrobust(big, ins).total;
                CHECK(sr < sn);
                CHECK(sn < ln);
                CHECK(sr > value_no_insider_robust(m).total);
                CHECK(sn > value_no_insider_nonrobust(m).total);
                CHECK(sr < prev_sr);
                CHECK(ln < prev_ln);
                prev_sr = sr;
                prev_ln = ln;
            }
        }
}

TEST_CASE("critical anticipation horizon") {
    const auto m = oracle::base_market();
    const double T0 = critical_T0(m);
    CHECK(T0 == doctest::Approx(oracle::critical_T0).epsilon(1e-9));
    CHECK(std::abs(critical_gap(m, T0)) <= 1e-6);
    CHECK(critical_gap(m, 0.9 * T0) > 0.0);
    CHECK(critical_gap(m, 1.1 * T0) < 0.0);
    // Impact is ignored on both sides.
    CHECK(critical_T0(oracle::large_market()) == T0);

    // Larger Sharpe ratio: stronger uninformed benchmark, shorter horizon.
    const FigureSweep sweep;
    for (double sigma : sweep.sigmas) {
        double prev = INFINITY;
        for (double mu : sweep.mus) {
            auto x = m;
            x.mu0 = mu;
            x.sigma = sigma;
            const double t = critical_T0(x);
            CHECK(t < prev);
            prev = t;
        }
    }

    auto flat = m;
    flat.mu0 = 0.0;
    CHECK(testutil::error_kind([&] { critical_T0(flat); }) == ErrorKind::NonConvergence);
    CHECK(testutil::error_code([&] { critical_T0(m, {8.0, 9.0}); }) == "bracket_not_straddling");
    CHECK(testutil::error_code([&] { critical_T0(m, {0.5, 9.0}); }) == "bracket_invalid");
}

TEST_CASE("figure tables") {
    FigureSweep sweep;
    sweep.include_bsde = false;
    const auto m = oracle::base_market();
    const auto fig1 = figure_data(FigureKind::Fig1, m, sweep);
    REQUIRE(fig1.rows.size() == sweep.T0s.size());
    const auto sr = fig1.column("small_robust"), sn = fig1.column("small_nonrobust"),
               ln = fig1.column("large_nonrobust"), nir = fig1.column("no_insider_robust");
    CHECK(std::isnan(fig1.rows[0][fig1.column("large_robust")]));
    for (std::size_t k = 1; k < fig1.rows.size(); ++k) {
        CHECK(fig1.rows[k][sr] < fig1.rows[k - 1][sr]);
        CHECK(fig1.rows[k][sn] < fig1.rows[k - 1][sn]);
        CHECK(fig1.rows[k][ln] < fig1.rows[k - 1][ln]);
        CHECK(fig1.rows[k][nir] == fig1.rows[0][nir]);
    }
    CHECK(fig1.rows[2][sr] == doctest::Approx(oracle::value_small_insider_robust).epsilon(1e-13));

    auto m8 = m;
    m8.mu0 = 0.08;
    const auto fig3 = figure_data(FigureKind::Fig3, m8, sweep);
    CHECK(fig3.rows[0][nir] == doctest::Approx(oracle::iota_mu008 * oracle::iota_mu008 / 4.0).epsilon(1e-13));

    const auto fig2 = figure_data(FigureKind::Fig2, m, sweep);
    CHECK(fig2.rows.size() == 25);
    CHECK(fig2.header == std::vector<std::string>{"mu", "sigma", "T0_star"});
    CHECK(fig2.rows[12][2] == doctest::Approx(oracle::critical_T0).epsilon(1e-9));

    const auto lines = figure_data(FigureKind::StrategyLines, m, sweep);
    CHECK(lines.rows.size() == sweep.strategy_W.size());
    for (const char* name : {"small_robust", "small_nonrobust", "large_nonrobust"}) {
        const auto a = lines.column(std::string("slope_") + name);
        const auto f = lines.column(std::string("fd_slope_") + name);
        for (const auto& row : lines.rows) CHECK(std::abs(row[a] - row[f]) <= 1e-10);
    }
    const auto wcol = lines.column("W_t"), pcol = lines.column("pi_small_robust");
    for (const auto& row : lines.rows)
        if (row[wcol] == 0.0) CHECK(row[pcol] == doctest::Approx(oracle::pi_small_example).epsilon(1e-14));

    for (auto k : {FigureKind::Fig1, FigureKind::Fig2, FigureKind::Fig3, FigureKind::StrategyLines})
        CHECK(figure_kind_from_string(to_string(k)) == k);
    CHECK(testutil::error_code([] { figure_kind_from_string("fig4"); }) == "unknown_figure");
}

}
