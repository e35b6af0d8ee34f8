#include "insider/paths.hpp"

#include "insider/csv.hpp"
#include "insider/error.hpp"
#include "insider/parallel.hpp"
#include "insider/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>

namespace insider {

namespace {

constexpr double kKnotTol = 1e-12;

std::atomic<unsigned> g_max_threads{0};

void merge_knots(std::vector<double>& knots) {
    std::sort(knots.begin(), knots.end());
    std::vector<double> out;
    for (double k : knots)
        if (out.empty() || k - out.back() > kKnotTol) out.push_back(k);
    knots.swap(out);
}

} // namespace

void set_max_threads(unsigned n) { g_max_threads = n; }

unsigned max_threads() {
    const unsigned cap = g_max_threads.load();
    if (cap > 0) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

TimeGrid TimeGrid::build(const MarketParams& market, const InsiderSpec& insider, int n_steps,
                         int n_steps_tail) {
    if (n_steps < 2) fail(ErrorKind::Validation, "n_steps_too_small", "n_steps must be >= 2");
    const double T = market.T;
    std::vector<double> head;
    for (int k = 0; k <= n_steps; ++k) head.push_back(T * k / n_steps);
    head.back() = T;
    for (double b : market.breakpoints()) head.push_back(b);
    if (insider.enlarged())
        for (double b : insider.phi_weight.starts())
            if (b > 0.0 && b < T) head.push_back(b);
    merge_knots(head);
    // Merging may have snapped T onto a nearby breakpoint; pin it.
    head.back() = T;

    TimeGrid g;
    g.index_T_ = head.size() - 1;
    g.knots_ = std::move(head);
    if (insider.enlarged()) {
        const double T0 = insider.T0;
        const int m = n_steps_tail > 0
                          ? n_steps_tail
                          : std::max(1, static_cast<int>(std::ceil((T0 - T) / (T / n_steps) - 1e-9)));
        std::vector<double> tail;
        for (int k = 1; k <= m; ++k) tail.push_back(T + (T0 - T) * k / m);
        tail.back() = T0;
        for (double b : insider.phi_weight.starts())
            if (b > T && b < T0) tail.push_back(b);
        merge_knots(tail);
        tail.back() = T0;
        g.knots_.insert(g.knots_.end(), tail.begin(), tail.end());
    }
    return g;
}

TimeGrid TimeGrid::from_knots(std::vector<double> knots, std::size_t index_T) {
    if (knots.size() < 2 || index_T == 0 || index_T >= knots.size())
        fail(ErrorKind::Validation, "grid_malformed", "grid needs at least one step before T");
    if (knots.front() != 0.0) fail(ErrorKind::Validation, "grid_malformed", "grid must start at 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            fail(ErrorKind::Validation, "grid_not_increasing", "grid knots must be strictly increasing");
    TimeGrid g;
    g.knots_ = std::move(knots);
    g.index_T_ = index_T;
    return g;
}

std::size_t TimeGrid::knot_index(double t) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t - kKnotTol);
    if (it == knots_.end() || std::abs(*it - t) > kKnotTol)
        fail(ErrorKind::Domain, "not_a_knot", "time " + std::to_string(t) + " is not a grid knot");
    return static_cast<std::size_t>(it - knots_.begin());
}

double information_drift_at(const InsiderSpec& insider, double Y0, double B_t, double t) {
    if (!insider.enlarged()) return 0.0;
    if (!(t < insider.T0))
        fail(ErrorKind::Domain, "drift_at_or_after_t0", "information drift needs t < T0");
    return (Y0 - B_t) * insider.phi_weight(t) / phi_norm_sq(insider, t, insider.T0);
}

std::vector<double> information_drift(const PathBatch& batch, const InsiderSpec& insider) {
    const std::size_t n = batch.steps();
    std::vector<double> phi(batch.n_paths * n, 0.0);
    if (!insider.enlarged()) return phi;
    // Weight and remaining norm depend on time only.
    std::vector<double> weight(n), norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = batch.grid.t(i);
        if (!(t < insider.T0))
            fail(ErrorKind::Domain, "drift_at_or_after_t0", "information drift needs t < T0");
        weight[i] = insider.phi_weight(t);
        norm[i] = phi_norm_sq(insider, t, insider.T0);
    }
    parallel_for(batch.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const auto B = batch.B_path(p);
            for (std::size_t i = 0; i < n; ++i)
                phi[p * n + i] = (batch.Y0[p] - B[i]) * weight[i] / norm[i];
        }
    });
    return phi;
}

std::vector<double> decompose(const PathBatch& batch) {
    const std::size_t n = batch.steps();
    if (batch.phi_drift.size() != batch.n_paths * n)
        fail(ErrorKind::GridMismatch, "drift_missing", "information drift not computed for this batch");
    std::vector<double> out(batch.n_paths * n);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const auto dW = batch.dW_path(p);
        for (std::size_t i = 0; i < n; ++i)
            out[p * n + i] = dW[i] - batch.phi_drift[p * n + i] * batch.grid.dt(i);
    }
    return out;
}

namespace {

// Fill W, B, Y0, W_T0 from dW, then drift and decomposition.
void finish_batch(PathBatch& b, const InsiderSpec& insider) {
    const std::size_t n_all = b.grid.n_steps();
    const std::size_t n = b.steps();
    std::vector<double> weight(n_all);
    for (std::size_t i = 0; i < n_all; ++i)
        weight[i] = insider.enlarged() ? insider.phi_weight(b.grid.t(i)) : 0.0;

    b.W.assign(b.n_paths * (n + 1), 0.0);
    b.B.assign(b.n_paths * (n + 1), 0.0);
    b.Y0.assign(b.n_paths, 0.0);
    b.W_T0.assign(b.n_paths, 0.0);
    parallel_for(b.n_paths, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const double* dW = b.dW.data() + p * n_all;
            double* W = b.W.data() + p * (n + 1);
            double* B = b.B.data() + p * (n + 1);
            double w = 0.0, y = 0.0;
            for (std::size_t i = 0; i < n_all; ++i) {
                w += dW[i];
                y += weight[i] * dW[i];
                if (i + 1 <= n) {
                    W[i + 1] = w;
                    B[i + 1] = y;
                }
            }
            b.Y0[p] = y;
            b.W_T0[p] = w;
        }
    });
    b.phi_drift = information_drift(b, insider);
    b.dWH = decompose(b);
}

} // namespace

PathBatch sample_paths(const ScenarioConfig& config, std::uint64_t first_path, std::size_t count) {
    PathBatch b;
    b.grid = TimeGrid::build(config.market, config.insider, config.n_steps, config.n_steps_tail);
    b.first_path = first_path;
    b.n_paths = count;
    const std::size_t n_all = b.grid.n_steps();
    std::vector<double> sqdt(n_all);
    for (std::size_t i = 0; i < n_all; ++i) sqdt[i] = std::sqrt(b.grid.dt(i));

    b.dW.resize(count * n_all);
    parallel_for(count, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            const NormalStream normals(config.seed, first_path + p);
            double* dW = b.dW.data() + p * n_all;
            for (std::size_t blk = 0; 2 * blk < n_all; ++blk) {
                const auto z = normals.pair(blk);
                dW[2 * blk] = sqdt[2 * blk] * z[0];
                if (2 * blk + 1 < n_all) dW[2 * blk + 1] = sqdt[2 * blk + 1] * z[1];
            }
        }
    });
    finish_batch(b, config.insider);
    return b;
}

PathBatch sample_paths(const ScenarioConfig& config) {
    return sample_paths(config, 0, static_cast<std::size_t>(config.n_paths));
}

PathBatch coarsen(const PathBatch& batch, const InsiderSpec& insider, int factor) {
    const auto f = static_cast<std::size_t>(factor);
    const std::size_t n_all = batch.grid.n_steps();
    const std::size_t n = batch.steps();
    if (factor < 1 || n % f != 0 || (n_all - n) % f != 0)
        fail(ErrorKind::GridMismatch, "coarsen_factor",
             "coarsening factor must divide the step counts on [0, T] and (T, T0]");
    std::vector<double> knots;
    for (std::size_t i = 0; i <= n_all; i += f) knots.push_back(batch.grid.t(i));
    PathBatch c;
    c.grid = TimeGrid::from_knots(std::move(knots), n / f);
    // Piecewise-constant weights must stay constant on each coarse step.
    if (insider.enlarged())
        for (std::size_t i = 0; i < n_all; ++i)
            if (insider.phi_weight(batch.grid.t(i)) != insider.phi_weight(batch.grid.t(i - i % f)))
                fail(ErrorKind::GridMismatch, "coarsen_breakpoint",
                     "a weight breakpoint falls inside a coarse step");
    c.first_path = batch.first_path;
    c.n_paths = batch.n_paths;
    const std::size_t m = n_all / f;
    c.dW.assign(c.n_paths * m, 0.0);
    for (std::size_t p = 0; p < c.n_paths; ++p)
        for (std::size_t i = 0; i < n_all; ++i) c.dW[p * m + i / f] += batch.dW[p * n_all + i];
    finish_batch(c, insider);
    return c;
}

void write_path_dump(std::ostream& os, const PathBatch& batch) {
    CsvWriter csv(os, {"path", "t", "dW", "phi", "dWH"});
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        const auto dW = batch.dW_path(p);
        for (std::size_t i = 0; i < batch.steps(); ++i)
            csv.row(static_cast<double>(batch.first_path + p), batch.grid.t(i), dW[i],
                    batch.phi_drift[p * batch.steps() + i], batch.dWH[p * batch.steps() + i]);
    }
}

} // namespace insider
