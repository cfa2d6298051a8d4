#pragma once

#include "conic/instance.hpp"
#include "conic/phases.hpp"
#include "conic/rescale.hpp"
#include "conic/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conic {

struct SolveConfig {
    PhaseMode phase_mode = PhaseMode::MwuModified;
    RescaleMode rescale_mode = RescaleMode::MultiRank;
    std::optional<double> rho_hint; // sets the phase budget when provided
    long max_phases = 0;            // 0: ceil(8 n ln(1/rho_hint)) or 10000
    long max_iters_per_phase = 0;   // 0: per-mode default
    std::uint64_t seed = 0;
    double termination_phi_log = 0.0;
    bool derandomize = false;       // rank-1 direction via conditional expectations
    double alpha_cap = kDefaultAlphaCap;
    double log_exponent_a = 1.0;
    bool fixed_step = false;        // the fixed-step John variant
    bool record_trace = false;
};

struct RoundednessReport {
    Vector z;
    long t = 0;                    // iterations of the final phase
    double inner_radius = 0.0;     // 1/T
    double outer_radius_bound = 0.0; // 1 + ||z||
    double ratio = 0.0;            // (1 + ||z||) * T
};

struct SolveResult {
    Certificate certificate;
    long phases_used = 0;
    long total_iterations = 0;
    long rescales = 0;
    double det_growth_log_sum = 0.0;
    double delta = 0.0; // evidence threshold used
    TransformLog transforms;
    NormState final_norm = NormState::identity(1);
    std::optional<ConeInstance> final_instance;
    std::optional<RoundednessReport> roundedness;
    std::vector<long> phase_iterations;
    std::vector<RescaleReport> rescale_reports;
    std::vector<TraceRow> trace;
    std::string summary;
};

/// Effective phase budget for a config on an n-dimensional instance.
long phase_budget(const SolveConfig& cfg, int n);

/// Runs phases interleaved with the configured rescale until the phase finds
/// a feasible point (pulled back to original coordinates, verified, and
/// returned as a Feasible certificate) or the budget runs out
/// (BudgetExhausted). Rank-1 mode keeps Euclidean geometry and transforms the
/// cone; multi-rank transforms the cone; norm-update keeps the cone and
/// evolves H.
SolveResult solve(const ConeInstance& instance, const SolveConfig& cfg);

/// Runs solve with the Phi < 1/e termination and reports the approximate
/// John ellipsoid of the final working cone: center z = x^(T)/T with
/// <A_i, z> >= 1/T and ||z|| <= 1/2. Requires an MWU phase mode and a
/// cone-transforming rescale mode.
SolveResult john_ellipsoid(const ConeInstance& instance, const SolveConfig& cfg);

/// True iff <A_i, z> >= 1/T - 1e-12 for every (Euclidean-unit) working row
/// and ||z|| <= 1/2 + 1e-12: certifies B(z, 1/T) subset P cap B subset B(z, 1 + ||z||).
bool roundedness_check(const ConeInstance& final_instance, const Vector& z, long t);

} // namespace conic
