#pragma once

#include "conic/solver.hpp"
#include "conic/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conic {

struct SweepGrid {
    std::vector<int> ns;
    std::vector<int> ms;   // paired with ns entrywise when sizes match, else crossed
    std::vector<double> rhos;
    std::vector<PhaseMode> modes;
    std::vector<RescaleMode> rescales;
    std::vector<std::uint64_t> seeds;
    int threads = 1;
};

struct SweepRow {
    int n = 0;
    int m = 0;
    double rho = 0.0;
    PhaseMode mode = PhaseMode::MwuStandard;
    RescaleMode rescale = RescaleMode::MultiRank;
    long phases = 0;
    long iters = 0;
    long rescale_count = 0;
    double mean_phase_iters = 0.0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    std::string status; // feasible | exhausted | error:<what>
};

struct SlopeFit {
    PhaseMode mode = PhaseMode::MwuStandard;
    double iters_vs_n = 0.0;       // log-log slope of mean per-phase iterations
    double iters_vs_log_inv_rho = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows; // sorted by (n, m, rho, mode, rescale, seed)
    std::vector<SlopeFit> fits;

    /// Fixed columns: n,m,rho,mode,rescale,phases,iters,rescales,wall_ms,seed,status
    std::string to_csv() const;
};

/// Runs a solve for every grid cell (optionally in parallel; each cell owns
/// its RNG streams) and fits the per-mode iteration scaling laws. Cells that
/// fail are flagged in their status and the sweep continues.
SweepReport bench_sweep(const SweepGrid& grid, std::uint64_t root_seed);

} // namespace conic
