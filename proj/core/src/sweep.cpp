#include "conic/sweep.hpp"

#include "conic/rng.hpp"
#include "conic/stats.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace conic {

namespace {

struct Cell {
    int n, m;
    double rho;
    PhaseMode mode;
    RescaleMode rescale;
    std::uint64_t seed;
};

std::string cell_label(const Cell& c, const char* purpose) {
    std::ostringstream oss;
    oss << purpose << "-n" << c.n << "-m" << c.m << "-rho" << c.rho << "-mode"
        << to_string(c.mode) << "-rescale" << to_string(c.rescale) << "-seed" << c.seed;
    return oss.str();
}

SweepRow run_cell(const Cell& cell, std::uint64_t root_seed) {
    SweepRow row;
    row.n = cell.n;
    row.m = cell.m;
    row.rho = cell.rho;
    row.mode = cell.mode;
    row.rescale = cell.rescale;
    row.seed = cell.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        auto [instance, witness] = generate_planted(
            cell.n, cell.m, cell.rho, derive_seed(root_seed, cell_label(cell, "sweep-gen")));
        SolveConfig cfg;
        cfg.phase_mode = cell.mode;
        cfg.rescale_mode = cell.rescale;
        cfg.rho_hint = cell.rho;
        cfg.seed = derive_seed(root_seed, cell_label(cell, "sweep-solve"));
        const SolveResult result = solve(instance, cfg);
        row.phases = result.phases_used;
        row.iters = result.total_iterations;
        row.rescale_count = result.rescales;
        row.mean_phase_iters = result.phases_used > 0
                                   ? static_cast<double>(result.total_iterations) /
                                         static_cast<double>(result.phases_used)
                                   : 0.0;
        row.status = result.certificate.is_feasible() ? "feasible" : "exhausted";
    } catch (const Error& e) {
        row.status = std::string("error:") + e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return row;
}

bool row_key_less(const SweepRow& a, const SweepRow& b) {
    return std::tie(a.n, a.m, a.rho, a.mode, a.rescale, a.seed) <
           std::tie(b.n, b.m, b.rho, b.mode, b.rescale, b.seed);
}

} // namespace

std::string SweepReport::to_csv() const {
    std::ostringstream oss;
    oss << "n,m,rho,mode,rescale,phases,iters,rescales,wall_ms,seed,status\n";
    for (const auto& r : rows) {
        oss << r.n << ',' << r.m << ',' << r.rho << ',' << to_string(r.mode) << ','
            << to_string(r.rescale) << ',' << r.phases << ',' << r.iters << ','
            << r.rescale_count << ',' << r.wall_ms << ',' << r.seed << ',' << r.status
            << '\n';
    }
    return oss.str();
}

SweepReport bench_sweep(const SweepGrid& grid, std::uint64_t root_seed) {
    if (grid.ns.empty() || grid.rhos.empty() || grid.modes.empty() || grid.rescales.empty() ||
        grid.seeds.empty())
        throw InvalidArgument("bench_sweep: every grid axis must be non-empty");

    const bool paired = grid.ms.size() == grid.ns.size();
    if (!paired && grid.ms.empty())
        throw InvalidArgument("bench_sweep: ms must be given (paired with ns or crossed)");

    std::vector<Cell> cells;
    for (std::size_t ni = 0; ni < grid.ns.size(); ++ni) {
        const std::vector<int> ms =
            paired ? std::vector<int>{grid.ms[ni]} : grid.ms;
        for (int m : ms)
            for (double rho : grid.rhos)
                for (PhaseMode mode : grid.modes)
                    for (RescaleMode rescale : grid.rescales)
                        for (std::uint64_t seed : grid.seeds)
                            cells.push_back({grid.ns[ni], m, rho, mode, rescale, seed});
    }

    SweepReport report;
    report.rows.resize(cells.size());
    const int threads = std::max(1, grid.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            report.rows[i] = run_cell(cells[i], root_seed);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) return;
                    report.rows[i] = run_cell(cells[i], root_seed);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    std::sort(report.rows.begin(), report.rows.end(), row_key_less);

    // Scaling fits per phase mode, feasible rows only.
    for (PhaseMode mode : grid.modes) {
        SlopeFit fit;
        fit.mode = mode;
        std::map<int, std::pair<double, long>> by_n;
        std::map<double, std::pair<double, long>> by_rho;
        for (const auto& r : report.rows) {
            if (r.mode != mode || r.status != "feasible") continue;
            by_n[r.n].first += r.mean_phase_iters;
            by_n[r.n].second += 1;
            by_rho[r.rho].first += static_cast<double>(r.iters);
            by_rho[r.rho].second += 1;
        }
        if (by_n.size() >= 2) {
            std::vector<double> xs, ys;
            for (const auto& [n, acc] : by_n) {
                xs.push_back(static_cast<double>(n));
                ys.push_back(acc.first / static_cast<double>(acc.second));
            }
            fit.iters_vs_n = loglog_slope(xs, ys);
        }
        if (by_rho.size() >= 2) {
            std::vector<double> xs, ys;
            for (const auto& [rho, acc] : by_rho) {
                xs.push_back(std::log(1.0 / rho));
                ys.push_back(acc.first / static_cast<double>(acc.second));
            }
            fit.iters_vs_log_inv_rho = loglog_slope(xs, ys);
        }
        report.fits.push_back(fit);
    }
    return report;
}

} // namespace conic
