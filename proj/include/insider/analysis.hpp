#pragma once

#include "insider/csv.hpp"
#include "insider/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace insider {

struct ValueBreakdown {
    double base = 0.0;            // ln X0 + int r
    double merton = 0.0;          // 1/2 int (sigma / sigma_tilde) iota^2
    double rent = 0.0;            // insider-information term
    double penalty_adjust = 0.0;  // robustness correction
    double total = 0.0;
};

double integral_iota(const MarketParams& market);
double integral_iota_sq(const MarketParams& market);

ValueBreakdown value_no_insider_robust(const MarketParams& market);
ValueBreakdown value_no_insider_nonrobust(const MarketParams& market);
ValueBreakdown value_small_insider_robust(const MarketParams& market, const InsiderSpec& insider);
ValueBreakdown value_small_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider);
ValueBreakdown value_large_insider_nonrobust(const MarketParams& market, const InsiderSpec& insider);

struct Bracket {
    double low = 0.0;   // 0: just above T
    double high = 0.0;  // 0: 1e4 T
};

// Excess of the small robust insider over the uninformed non-robust trader,
// both with varrho = 0; positive for T0 near T.
double critical_gap(const MarketParams& market, double T0);

// Root of critical_gap in T0 by bisection; |gap| <= tol at the returned T0.
double critical_T0(const MarketParams& market, Bracket bracket = {}, double tol = 1e-6);

enum class FigureKind { Fig1, Fig2, Fig3, StrategyLines };
std::string to_string(FigureKind kind);
FigureKind figure_kind_from_string(const std::string& s);

struct FigureSweep {
    std::vector<double> T0s{1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0};
    std::vector<double> mus{0.10, 0.125, 0.15, 0.175, 0.20};
    std::vector<double> sigmas{0.25, 0.30, 0.35, 0.40, 0.45};
    double large_varrho_factor = 0.25;  // large trader: varrho = factor * sigma^2
    double strategy_T0 = 2.0;
    double strategy_t_frac = 0.5;
    double strategy_W_T0 = 1.0;
    std::vector<double> strategy_W{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    double fd_step = 1e-3;
    bool include_bsde = true;
    std::int64_t bsde_paths = 20000;
    int bsde_steps = 50;
    std::uint64_t seed = 20240101;
};

// Figure 1 / 3 tables report V - ln X0. fig1 and fig3 differ only in the
// market passed in.
Table figure_data(FigureKind kind, const MarketParams& market, const FigureSweep& sweep = {});

} // namespace insider
