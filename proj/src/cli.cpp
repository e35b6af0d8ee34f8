#include "insider/cli.hpp"

#include "insider/analysis.hpp"
#include "insider/anticipating.hpp"
#include "insider/bsde.hpp"
#include "insider/config.hpp"
#include "insider/csv.hpp"
#include "insider/error.hpp"
#include "insider/parallel.hpp"
#include "insider/simulate.hpp"
#include "insider/strategies.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace insider::cli {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::string config;
    std::string out;
    unsigned threads = 0;
    double mu = 0, sigma = 0, r = 0, varrho = 0, T = 0, X0 = 0, T0 = 0;
    std::string insider, robust;
    int steps = 0, steps_tail = 0;
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_common(CLI::App& app, Overrides& o) {
    o.opts["config"] = app.add_option("--config", o.config, "INI config file with [market], [insider], [run]");
    o.opts["out"] = app.add_option("--out", o.out,
                                   std::string("output directory for CSVs (default: $") + kOutDirEnv + " or .)");
    o.opts["threads"] = app.add_option("--threads", o.threads, "worker cap, 0 = all cores (results unaffected)");
    o.opts["mu"] = app.add_option("--mu", o.mu, "constant base drift mu0 [1/time]");
    o.opts["sigma"] = app.add_option("--sigma", o.sigma, "constant volatility sigma [1/sqrt(time)]");
    o.opts["r"] = app.add_option("--r", o.r, "constant risk-free rate r [1/time]");
    o.opts["varrho"] = app.add_option("--varrho", o.varrho, "constant price-impact coefficient varrho [1/time]");
    o.opts["T"] = app.add_option("--T", o.T, "trading horizon T [time]");
    o.opts["X0"] = app.add_option("--X0", o.X0, "initial wealth X0 [currency]");
    o.opts["T0"] = app.add_option("--T0", o.T0, "information horizon T0 [time]; implies --insider enlargement");
    o.opts["insider"] =
        app.add_option("--insider", o.insider, "insider kind: none | enlargement")->check(CLI::IsMember({"none", "enlargement"}));
    o.opts["robust"] =
        app.add_option("--robust", o.robust, "model uncertainty on/off: true | false")->check(CLI::IsMember({"true", "false"}));
    o.opts["steps"] = app.add_option("--steps", o.steps, "grid steps on [0, T] [count]");
    o.opts["steps-tail"] = app.add_option("--steps-tail", o.steps_tail, "grid steps on (T, T0], 0 = same step [count]");
    o.opts["paths"] = app.add_option("--paths", o.paths, "Monte-Carlo paths [count]");
    o.opts["seed"] = app.add_option("--seed", o.seed, "64-bit RNG seed");
}

RunSettings resolve(const Overrides& o) {
    RunSettings s;
    s.scenario = default_scenario();
    if (o.given("config")) s = load_config(o.config, s);
    ScenarioConfig& c = s.scenario;
    if (o.given("mu")) c.market.mu0 = PiecewiseConstant(o.mu);
    if (o.given("sigma")) c.market.sigma = PiecewiseConstant(o.sigma);
    if (o.given("r")) c.market.r = PiecewiseConstant(o.r);
    if (o.given("varrho")) c.market.varrho = PiecewiseConstant(o.varrho);
    if (o.given("T")) c.market.T = o.T;
    if (o.given("X0")) c.market.X0 = o.X0;
    if (o.given("T0")) {
        c.insider.T0 = o.T0;
        c.insider.kind = InsiderKind::InitialEnlargement;
    }
    if (o.given("insider")) c.insider.kind = insider_kind_from_string(o.insider);
    if (o.given("robust")) c.robust = o.robust == "true";
    if (o.given("steps")) c.n_steps = o.steps;
    if (o.given("steps-tail")) c.n_steps_tail = o.steps_tail;
    if (o.given("paths")) c.n_paths = o.paths;
    if (o.given("seed")) c.seed = o.seed;
    if (o.given("threads")) s.threads = o.threads;
    if (o.given("out")) s.out_dir = o.out;
    if (s.out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        s.out_dir = env && *env ? env : ".";
    }
    validate(c);
    return s;
}

// Collects output paths for the run report.
class Outputs {
public:
    explicit Outputs(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::Io, "out_dir", "cannot create output directory " + dir_ + ": " + ec.message());
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const std::string path = (fs::path(dir_) / name).string();
        std::ofstream os(path, std::ios::binary);
        if (!os) fail(ErrorKind::Io, "out_file", "cannot open " + path);
        body(os);
        if (!os) fail(ErrorKind::Io, "out_file", "write failed for " + path);
        written_.push_back(path);
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::string dir_;
    std::vector<std::string> written_;
};

StrategyKind default_strategy(const ScenarioConfig& c) {
    const bool enl = c.insider.enlarged();
    if (c.robust) return enl ? StrategyKind::SmallInsiderRobust : StrategyKind::NoInsiderRobust;
    if (!enl) return StrategyKind::NoInsiderNonRobust;
    return c.market.small_trader() ? StrategyKind::SmallInsiderNonRobust : StrategyKind::LargeInsiderNonRobust;
}

// Analytic value of a closed-form regime, NaN where no formula applies.
double analytic_value(StrategyKind kind, const ScenarioConfig& c) {
    try {
        switch (kind) {
        case StrategyKind::NoInsiderRobust: return value_no_insider_robust(c.market).total;
        case StrategyKind::NoInsiderNonRobust: return value_no_insider_nonrobust(c.market).total;
        case StrategyKind::SmallInsiderRobust: return value_small_insider_robust(c.market, c.insider).total;
        case StrategyKind::SmallInsiderNonRobust: return value_small_insider_nonrobust(c.market, c.insider).total;
        case StrategyKind::LargeInsiderNonRobust: return value_large_insider_nonrobust(c.market, c.insider).total;
        case StrategyKind::LargeInsiderRobust: break;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
    }
    return NAN;
}


// ---- value ----------------------------------------------------------------

void cmd_value(const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const ScenarioConfig& c = s.scenario;
    struct Row {
        std::string regime;
        ValueBreakdown v;
    };
    std::vector<Row> rows;
    auto attempt = [&](const std::string& name, auto&& f) {
        try {
            rows.push_back({name, f()});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) throw;
            log << "skipped " << name << ": " << e.what() << "\n";
        }
    };
    attempt("NoInsiderRobust", [&] { return value_no_insider_robust(c.market); });
    attempt("NoInsiderNonRobust", [&] { return value_no_insider_nonrobust(c.market); });
    if (c.insider.enlarged()) {
        attempt("SmallInsiderRobust", [&] { return value_small_insider_robust(c.market, c.insider); });
        attempt("SmallInsiderNonRobust", [&] { return value_small_insider_nonrobust(c.market, c.insider); });
        attempt("LargeInsiderNonRobust", [&] { return value_large_insider_nonrobust(c.market, c.insider); });
    }
    outputs.write("values.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"regime", "base", "merton", "rent", "penalty_adjust", "total"});
        for (const auto& r : rows)
            csv.row(r.regime, r.v.base, r.v.merton, r.v.rent, r.v.penalty_adjust, r.v.total);
    });
}

// ---- simulate / martingale -------------------------------------------------

struct SimFlags {
    std::string strategy;
    double pi_scale = 1.0;
    double theta_scale = 1.0;
    std::size_t chunk = 25000;
    std::size_t dump_paths = 0;
    int intervals = 10;
};

StrategyKind pick_strategy(const SimFlags& f, const ScenarioConfig& c) {
    return f.strategy.empty() ? default_strategy(c) : strategy_kind_from_string(f.strategy);
}

void cmd_simulate(const SimFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const ScenarioConfig& c = s.scenario;
    const StrategyKind kind = pick_strategy(f, c);
    McOptions opt;
    opt.chunk = f.chunk;
    opt.pi_scale = f.pi_scale;
    opt.theta_scale = f.theta_scale;
    const McResult res = run_monte_carlo(c, kind, opt);
    const double ref = f.pi_scale == 1.0 && f.theta_scale == 1.0 ? analytic_value(kind, c) : NAN;
    outputs.write("simulate.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"strategy", "n_paths", "J", "J_se", "analytic_value", "J_z", "lnXT_mean", "lnXT_se",
                           "epsT_mean", "epsT_se", "entropy_lhs", "entropy_lhs_se", "entropy_rhs", "entropy_rhs_se",
                           "entropy_gap_z"});
        csv.row(to_string(kind), static_cast<unsigned long long>(res.n_paths), res.J.mean, res.J.std_error, ref,
                std::isnan(ref) ? NAN : (res.J.mean - ref) / res.J.std_error, res.lnXT.mean, res.lnXT.std_error,
                res.epsT.mean, res.epsT.std_error, res.entropy.lhs.mean, res.entropy.lhs.std_error,
                res.entropy.rhs.mean, res.entropy.rhs.std_error, res.entropy.z());
    });
    if (f.dump_paths > 0) {
        const PathBatch batch =
            sample_paths(c, 0, std::min<std::size_t>(f.dump_paths, static_cast<std::size_t>(c.n_paths)));
        outputs.write("paths.csv", [&](std::ostream& os) { write_path_dump(os, batch); });
    }
    log << "J = " << format_double(res.J.mean) << " +- " << format_double(res.J.std_error) << "\n";
}

void cmd_martingale(const SimFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const ScenarioConfig& c = s.scenario;
    const StrategyKind kind = pick_strategy(f, c);
    if (!is_robust(kind)) fail(ErrorKind::Validation, "requires_robust", "martingale check needs a robust regime");
    McOptions opt;
    opt.chunk = f.chunk;
    opt.pi_scale = f.pi_scale;
    opt.theta_scale = f.theta_scale;
    opt.checkpoints = default_checkpoints(c.market.T, f.intervals);
    const McResult res = run_monte_carlo(c, kind, opt);
    double worst = 0.0;
    outputs.write("martingale.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"t", "h", "estimate", "se", "z"});
        for (const auto& r : res.martingale) {
            csv.row(r.t, r.h, r.stats.mean, r.stats.std_error, r.stats.z());
            worst = std::max(worst, std::abs(r.stats.z()));
        }
    });
    log << "max |z| = " << format_double(worst) << "\n";
}

// ---- BSDE -------------------------------------------------------------------

struct BsdeFlags {
    int order = 3;
    std::string scheme = "auto";
    double c2_init = NAN;
    double tol = 1e-3;
    int max_iter = 50;
    int c2_order = 2;
};

void cmd_bsde_linear(const BsdeFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const ScenarioConfig& c = s.scenario;
    const LinearScheme scheme = f.scheme == "direct" ? LinearScheme::Direct
                                : f.scheme == "log"  ? LinearScheme::LogTransform
                                                     : LinearScheme::Auto;
    const PathBatch batch = sample_paths(c);
    const BsdeSolution sol = solve_linear_lsmc(batch, c.market, c.insider, f.order, scheme);
    const StrategyProfile est = recover_controls(sol, c.market, batch, BsdeKind::Linear);
    std::optional<BsdeSolution> oracle;
    std::optional<StrategyProfile> ref;
    try {
        oracle = solve_linear_closed_form(batch, c.market, c.insider);
        ref = build_profile(c.insider.enlarged() ? StrategyKind::SmallInsiderRobust : StrategyKind::NoInsiderRobust,
                            batch, c.market, c.insider);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
        log << "no closed-form oracle: " << e.what() << "\n";
    }
    const std::size_t N = batch.n_paths, n = batch.steps();
    outputs.write("bsde_linear.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"t", "mean_Y", "mean_Z", "oracle_Y", "oracle_Z", "rmse_pi"});
        for (std::size_t i = 0; i <= n; ++i) {
            CompensatedSum y, z, oy, oz, e2;
            for (std::size_t p = 0; p < N; ++p) {
                y.add(sol.Y_at(p, i));
                if (oracle) oy.add(oracle->Y_at(p, i));
                if (i < n) {
                    z.add(sol.Z_at(p, i));
                    if (oracle) {
                        oz.add(oracle->Z_at(p, i));
                        const double d = est.pi[p * n + i] - ref->pi[p * n + i];
                        e2.add(d * d);
                    }
                }
            }
            const double dn = static_cast<double>(N);
            csv.row(batch.grid.t(i), y.value() / dn, i < n ? z.value() / dn : NAN, oracle ? oy.value() / dn : NAN,
                    oracle && i < n ? oz.value() / dn : NAN, oracle && i < n ? std::sqrt(e2.value() / dn) : NAN);
        }
    });
    std::vector<double> y0(N);
    for (std::size_t p = 0; p < N; ++p) y0[p] = sol.Y_at(p, 0);
    log << "Y0 mean = " << format_double(sample_stats(y0).mean) << "\n";
    if (ref) log << "relative pi RMSE (interior) = " << format_double(relative_rmse_interior(est.pi, ref->pi, N, n)) << "\n";
}

void cmd_bsde_quadratic(const BsdeFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const ScenarioConfig& c = s.scenario;
    QuadraticOptions q;
    q.basis_order = f.order;
    q.c2_order = f.c2_order;
    q.tolerance = f.tol;
    q.max_iterations = f.max_iter;
    const PathBatch batch = sample_paths(c);
    const double c2 = std::isnan(f.c2_init) ? std::log(c.market.X0) : f.c2_init;
    BsdeSolution sol;
    try {
        sol = solve_quadratic_lsmc(batch, c.market, c.insider, c2, q);
    } catch (const Error& e) {
        log << "shooting failed: " << e.what() << "\n";
        throw;
    }
    const std::size_t N = batch.n_paths, n = batch.steps();
    outputs.write("bsde_quadratic.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"t", "mean_L", "mean_Z"});
        for (std::size_t i = 0; i <= n; ++i) {
            CompensatedSum l, z;
            for (std::size_t p = 0; p < N; ++p) {
                l.add(sol.Y_at(p, i));
                if (i < n) z.add(sol.Z_at(p, i));
            }
            csv.row(batch.grid.t(i), l.value() / static_cast<double>(N),
                    i < n ? z.value() / static_cast<double>(N) : NAN);
        }
    });
    outputs.write("bsde_quadratic_trace.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"iteration", "c2", "residual"});
        for (const auto& st : sol.trace) csv.row(st.iteration, st.c, st.residual);
    });
    const SampleStats v = value_from_bsde(sol);
    log << "V = " << format_double(v.mean) << " +- " << format_double(v.std_error)
        << ", residual = " << format_double(sol.residual) << ", decile residual = " << format_double(sol.bin_residual)
        << "\n";
}

// ---- forward integral -------------------------------------------------------

struct ForwardFlags {
    std::string integrand = "WT";
    std::size_t fine_steps = 4096;
    std::size_t paths = 1000;
    double t = NAN;
    std::vector<double> multiples{8, 4, 2};
    double c = 1.0;
};

void cmd_forward(const ForwardFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const double T = s.scenario.market.T;
    const auto paths = fine_paths(s.scenario.seed, f.paths, f.fine_steps, T);
    std::vector<double> eps;
    for (double m : f.multiples) eps.push_back(m * T / static_cast<double>(f.fine_steps));
    const double t = std::isnan(f.t) ? T : f.t;
    const auto rows = convergence_table(paths, test_integrand_from_string(f.integrand), t, eps, f.c);
    outputs.write("forward_check.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"eps", "rms_error", "rel_rms", "ito_rms"});
        for (const auto& r : rows) csv.row(r.eps, r.rms_error, r.rel_rms, r.ito_rms);
    });
    log << "finest relative RMS = " << format_double(rows.back().rel_rms) << "\n";
}

// ---- critical T0 / figures --------------------------------------------------

struct CriticalFlags {
    double low = 0.0, high = 0.0, tol = 1e-6;
};

void cmd_critical(const CriticalFlags& f, const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const MarketParams& m = s.scenario.market;
    const double root = critical_T0(m, {f.low, f.high}, f.tol);
    outputs.write("critical_t0.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"mu", "sigma", "T0_star", "gap"});
        csv.row(m.mu0(0.0), m.sigma(0.0), root, critical_gap(m, root));
    });
    log << "T0* = " << format_double(root) << "\n";
}

struct FigureFlags {
    std::string which = "all";
    double fig3_mu = 0.08;
    std::int64_t bsde_paths = 20000;
    int bsde_steps = 50;
    bool no_bsde = false;
};

void cmd_figures(const FigureFlags& f, const RunSettings& s, Outputs& outputs, std::ostream&) {
    FigureSweep sweep;
    sweep.bsde_paths = f.bsde_paths;
    sweep.bsde_steps = f.bsde_steps;
    sweep.include_bsde = !f.no_bsde;
    sweep.seed = s.scenario.seed;
    if (s.scenario.insider.enlarged()) sweep.strategy_T0 = s.scenario.insider.T0;
    const MarketParams& m = s.scenario.market;
    MarketParams m3 = m;
    m3.mu0 = PiecewiseConstant(f.fig3_mu);
    auto emit = [&](FigureKind k, const MarketParams& mk) {
        const Table tab = figure_data(k, mk, sweep);
        outputs.write(to_string(k) + ".csv", [&](std::ostream& os) { tab.write(os); });
    };
    const bool all = f.which == "all";
    if (all || f.which == "fig1") emit(FigureKind::Fig1, m);
    if (all || f.which == "fig2") emit(FigureKind::Fig2, m);
    if (all || f.which == "fig3") emit(FigureKind::Fig3, m3);
    if (all || f.which == "strategy_lines") emit(FigureKind::StrategyLines, m);
}

// ---- selftest ---------------------------------------------------------------

struct Check {
    std::string name;
    double value, reference, tolerance;
    bool pass;
};

std::vector<Check> selftest_checks(std::uint64_t seed) {
    std::vector<Check> out;
    auto near = [&](const std::string& name, double v, double ref, double tol) {
        out.push_back({name, v, ref, tol, std::abs(v - ref) <= tol});
    };
    auto at_most = [&](const std::string& name, double v, double tol) {
        out.push_back({name, v, 0.0, tol, v <= tol});
    };

    ScenarioConfig base = default_scenario();
    base.seed = seed;
    MarketParams m = base.market;
    MarketParams large = m;
    large.varrho = PiecewiseConstant(0.35 * 0.35 / 4.0);
    InsiderSpec ins;
    ins.kind = InsiderKind::InitialEnlargement;
    ins.T0 = 2.0;

    near("value_no_insider_robust", value_no_insider_robust(m).total, 0.0459183673469387755, 1e-9);
    near("value_no_insider_nonrobust", value_no_insider_nonrobust(m).total, 0.0918367346938775510, 1e-9);
    near("value_no_insider_nonrobust_large", value_no_insider_nonrobust(large).total, 0.183673469387755102, 1e-9);
    near("value_small_insider_robust", value_small_insider_robust(m, ins).total, 0.286782674290776761, 1e-9);
    near("value_large_insider_nonrobust", value_large_insider_nonrobust(large, ins).total, 0.876820649947700411, 1e-9);

    {
        ScenarioConfig c = base;
        c.insider = ins;
        c.n_paths = 2000;
        c.n_steps = 50;
        const PathBatch b = sample_paths(c);
        const StrategyProfile prof = build_profile(StrategyKind::SmallInsiderRobust, b, m, ins);
        double worst = 0.0;
        for (std::size_t p = 0; p < b.n_paths; ++p)
            for (std::size_t i = 0; i < b.steps(); ++i) {
                const double t = b.grid.t(i), pi = prof.pi[p * b.steps() + i], th = prof.theta[p * b.steps() + i];
                const double phi = b.phi_drift[p * b.steps() + i];
                const double s = m.sigma(t), rho = m.varrho(t);
                worst = std::max(worst, std::abs(m.mu0(t) + 2.0 * rho * pi - m.r(t) - s * s * pi + s * phi + s * th));
            }
        at_most("half_characterization_identity", worst, 1e-12);
    }
    {
        ScenarioConfig c = base;
        c.n_paths = 20000;
        c.n_steps = 50;
        const McResult r = run_monte_carlo(c, StrategyKind::NoInsiderRobust);
        at_most("mc_J_no_insider_robust_z", std::abs(r.J.mean - value_no_insider_robust(m).total) / r.J.std_error, 4.0);
        at_most("mc_density_mean_z", std::abs(r.epsT.mean - 1.0) / r.epsT.std_error, 4.0);
    }
    {
        ScenarioConfig c = base;
        c.n_paths = 20000;
        c.n_steps = 25;
        const PathBatch b = sample_paths(c);
        const BsdeSolution sol = solve_linear_lsmc(b, m, c.insider, 3);
        near("lsmc_linear_Y0", sol.Y_at(0, 0), m.X0, 0.01 * m.X0);
        const StrategyProfile est = recover_controls(sol, m, b, BsdeKind::Linear);
        const StrategyProfile ref = build_profile(StrategyKind::NoInsiderRobust, b, m, c.insider);
        at_most("lsmc_linear_pi_rel_rmse", relative_rmse_interior(est.pi, ref.pi, b.n_paths, b.steps()), 0.05);

        const BsdeSolution q = solve_quadratic_lsmc(b, m, c.insider, std::log(m.X0));
        near("quadratic_value_degenerate", value_from_bsde(q).mean, value_no_insider_robust(m).total, 1e-3);
    }
    {
        const auto paths = fine_paths(seed, 200, 4096, 1.0);
        const std::vector<double> eps{8.0 / 4096, 4.0 / 4096, 2.0 / 4096};
        const auto rows = convergence_table(paths, TestIntegrand::WT, 1.0, eps);
        const bool mono = rows[0].rel_rms > rows[1].rel_rms && rows[1].rel_rms > rows[2].rel_rms;
        out.push_back({"forward_monotone", mono ? 1.0 : 0.0, 1.0, 0.0, mono});
        at_most("forward_rel_rms_finest", rows[2].rel_rms, 0.02);
    }
    {
        const double root = critical_T0(m);
        at_most("critical_t0_gap", std::abs(critical_gap(m, root)), 1e-6);
        out.push_back({"critical_t0_in_bracket", root, 7.0, 1.0, root >= 6.0 && root <= 8.0});
    }
    {
        FigureSweep sw;
        const Table tab = figure_data(FigureKind::StrategyLines, m, sw);
        double worst = 0.0;
        for (const auto& row : tab.rows)
            for (const char* k : {"small_robust", "small_nonrobust", "large_nonrobust"})
                worst = std::max(worst, std::abs(row[tab.column(std::string("slope_") + k)] -
                                                 row[tab.column(std::string("fd_slope_") + k)]));
        at_most("strategy_slope_fd", worst, 1e-10);
    }
    return out;
}

int cmd_selftest(const RunSettings& s, Outputs& outputs, std::ostream& log) {
    const auto checks = selftest_checks(s.scenario.seed);
    int failed = 0;
    outputs.write("selftest.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"check", "value", "reference", "tolerance", "pass"});
        for (const auto& c : checks) {
            csv.row(c.name, c.value, c.reference, c.tolerance, c.pass ? 1 : 0);
            if (!c.pass) ++failed;
        }
    });
    for (const auto& c : checks) log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_double(c.value) << "\n";
    return failed == 0 ? Ok : ValidationError;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::NonConvergence:
    case ErrorKind::RankDeficient: return NumericalFailure;
    default: return ValidationError;
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust insider portfolio laboratory: closed forms, Monte Carlo, BSDE solvers"};
    app.name("insider");
    app.require_subcommand(1, 1);
    app.fallthrough();
    Overrides ov;
    add_common(app, ov);

    SimFlags sim, mart;
    BsdeFlags bl, bq;
    ForwardFlags fw;
    CriticalFlags cr;
    FigureFlags fig;

    auto* value = app.add_subcommand("value", "closed-form value breakdown of every applicable regime");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo game value J, density and entropy identity");
    simulate->add_option("--strategy", sim.strategy, "regime, e.g. NoInsiderRobust, SmallInsiderRobust");
    simulate->add_option("--pi-scale", sim.pi_scale, "multiply pi* by this factor [dimensionless]");
    simulate->add_option("--theta-scale", sim.theta_scale, "multiply theta* by this factor [dimensionless]");
    simulate->add_option("--chunk", sim.chunk, "paths per memory chunk [count]")->check(CLI::PositiveNumber);
    simulate->add_option("--dump-paths", sim.dump_paths, "write paths.csv for the first N paths [count]");
    auto* martingale = app.add_subcommand("martingale", "weighted-increment martingale diagnostic");
    martingale->add_option("--strategy", mart.strategy, "robust regime: NoInsiderRobust | SmallInsiderRobust");
    martingale->add_option("--pi-scale", mart.pi_scale, "multiply pi* (negative control) [dimensionless]");
    martingale->add_option("--intervals", mart.intervals, "equal checkpoint intervals on [0, T] [count]")
        ->check(CLI::PositiveNumber);
    martingale->add_option("--chunk", mart.chunk, "paths per memory chunk [count]")->check(CLI::PositiveNumber);

    auto* bsde_lin = app.add_subcommand("bsde-linear", "least-squares Monte-Carlo solve of the linear BSDE");
    bsde_lin->add_option("--order", bl.order, "polynomial basis total degree [count]");
    bsde_lin->add_option("--scheme", bl.scheme, "auto | direct | log")->check(CLI::IsMember({"auto", "direct", "log"}));
    auto* bsde_quad = app.add_subcommand("bsde-quadratic", "quadratic BSDE with c2 shooting (large robust insider)");
    bsde_quad->add_option("--order", bq.order, "polynomial basis total degree [count]");
    bsde_quad->add_option("--c2-init", bq.c2_init, "initial terminal constant c2 [log-currency] (default ln X0)");
    bsde_quad->add_option("--tol", bq.tol, "shooting tolerance on L_0 - ln X0 [log-currency]");
    bsde_quad->add_option("--max-iter", bq.max_iter, "maximum shooting iterations [count]");
    bsde_quad->add_option("--c2-order", bq.c2_order, "degree of c2(Y0) under enlargement [count]");

    auto* forward = app.add_subcommand("forward-check", "forward-integral convergence and Ito residual");
    forward->add_option("--integrand", fw.integrand, "WT | WT_squared | AdaptedConstVol")
        ->check(CLI::IsMember({"WT", "WT_squared", "AdaptedConstVol"}));
    forward->add_option("--fine-steps", fw.fine_steps, "uniform steps on [0, T] [count]");
    forward->add_option("--fwd-paths", fw.paths, "number of fine paths [count]");
    forward->add_option("--t", fw.t, "evaluation time [time] (default T)");
    forward->add_option("--multiples", fw.multiples, "eps as multiples of the fine step [count]")->delimiter(',');
    forward->add_option("--const", fw.c, "c for AdaptedConstVol [1/sqrt(time)]");

    auto* critical = app.add_subcommand("critical-t0", "information horizon where robust insider meets Merton trader");
    critical->add_option("--low", cr.low, "bracket low end [time] (default just above T)");
    critical->add_option("--high", cr.high, "bracket high end [time] (default 1e4 T)");
    critical->add_option("--tol", cr.tol, "tolerance on the value gap [log-currency]");

    auto* figures = app.add_subcommand("figures", "figure data tables as CSV");
    figures->add_option("--which", fig.which, "all | fig1 | fig2 | fig3 | strategy_lines")
        ->check(CLI::IsMember({"all", "fig1", "fig2", "fig3", "strategy_lines"}));
    figures->add_option("--fig3-mu", fig.fig3_mu, "base drift for fig3 [1/time]");
    figures->add_option("--bsde-paths", fig.bsde_paths, "paths for the large robust BSDE curve [count]");
    figures->add_option("--bsde-steps", fig.bsde_steps, "steps for the large robust BSDE curve [count]");
    figures->add_flag("--no-bsde", fig.no_bsde, "skip the BSDE curve");

    auto* selftest = app.add_subcommand("selftest", "fast invariant suite; nonzero exit on any failure");

    std::vector<std::string> argv_store{"insider"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help() << "\nCommon options: insider --help\n";
        return ValidationError;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        const RunSettings settings = resolve(ov);
        set_max_threads(settings.threads);
        Outputs outputs(settings.out_dir);
        std::ostringstream log;
        int code = Ok;
        std::string command;
        if (value->parsed()) command = "value", cmd_value(settings, outputs, log);
        else if (simulate->parsed()) command = "simulate", cmd_simulate(sim, settings, outputs, log);
        else if (martingale->parsed()) command = "martingale", cmd_martingale(mart, settings, outputs, log);
        else if (bsde_lin->parsed()) command = "bsde-linear", cmd_bsde_linear(bl, settings, outputs, log);
        else if (bsde_quad->parsed()) command = "bsde-quadratic", cmd_bsde_quadratic(bq, settings, outputs, log);
        else if (forward->parsed()) command = "forward-check", cmd_forward(fw, settings, outputs, log);
        else if (critical->parsed()) command = "critical-t0", cmd_critical(cr, settings, outputs, log);
        else if (figures->parsed()) command = "figures", cmd_figures(fig, settings, outputs, log);
        else if (selftest->parsed()) command = "selftest", code = cmd_selftest(settings, outputs, log);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out << "command: " << command << "\n"
            << "seed: " << settings.scenario.seed << "\n"
            << "wall_time_s: " << format_double(wall) << "\n"
            << "outputs:\n";
        for (const auto& p : outputs.written()) out << "  " << p << "\n";
        out << "log:\n" << log.str() << "config:\n";
        write_config(out, settings);
        return code;
    } catch (const Error& e) {
        err << "error [" << e.code() << "]: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace insider::cli
