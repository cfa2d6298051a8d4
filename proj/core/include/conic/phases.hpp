#pragma once

#include "conic/instance.hpp"
#include "conic/norm_state.hpp"
#include "conic/types.hpp"

#include <cstdint>
#include <vector>

namespace conic {

struct TraceRow {
    int phase = 0;
    long iter = 0;
    double phi_log = 0.0;
    double norm_y_dual = 0.0;
    double epsilon = 0.0;
    PhaseMode mode = PhaseMode::MwuStandard;
};

struct PhaseConfig {
    double delta = 0.0;           // evidence threshold (set by the driver)
    long max_iters = 0;           // 0: per-mode default
    PhaseMode mode = PhaseMode::MwuStandard;
    double log_exponent_a = 1.0;  // a in the (log n)^a step-size factors
    std::uint64_t seed = 0;
    double termination_phi_log = 0.0; // 0: Phi < 1; -1: Phi < 1/e
    bool fixed_step = false;      // standard GD with epsilon = 1/(2n), Phi < 1/m
    bool record_rows = false;
    int phase_index = 0;
};

struct PhaseOutcome {
    enum class Kind { Feasible, Evidence, Exhausted } kind = Kind::Exhausted;
    Vector x;             // Feasible: point in working coordinates
    Vector lambda;        // Evidence
    double evidence_norm = 0.0;
    long iterations = 0;
    double min_phi_log = 0.0;
    // Monitored product log||y|| + 2 log Phi of the modified phase: mean
    // per-iteration decrease, for the scaling reports.
    double monitored_mean_drop = 0.0;
    std::vector<TraceRow> rows;
};

/// Default per-mode iteration cap used when PhaseConfig.max_iters == 0.
long default_phase_iteration_cap(PhaseMode mode, int n, int m, double delta);

/// Baseline: walk into the most-violated constraint (ties to the lowest
/// index). Evidence is extracted from visit frequencies, which for this
/// update rule is x/t. Euclidean geometry only.
PhaseOutcome classical_perceptron(const ConeInstance& instance, const PhaseConfig& cfg);

/// Smoothed perceptron: Nesterov-style alternation of aggregation and
/// gradient steps on softmax weights with mu_{k+1} = (1 - theta_k) mu_k,
/// theta_k = 2/(k+3).
PhaseOutcome smooth_perceptron(const ConeInstance& instance, const PhaseConfig& cfg,
                               const NormState& norm);

/// Standard gradient descent on the potential: x <- x + H^-1 y / 2. Each
/// executed step is checked against the decrease bound
/// Phi(x + y/2) <= Phi(x) e^{-||y||^2/4} (log domain, 1e-9 relative);
/// violation throws NumericalFailure.
PhaseOutcome mwu_standard(const ConeInstance& instance, const PhaseConfig& cfg,
                          const NormState& norm);

/// Modified gradient descent: direction from the approximate eigencomponent
/// of the Hessian, step size from choose_step. The monitored quantity
/// log||y||_{H^-1} + 2 log Phi must strictly decrease; three consecutive
/// non-decreasing iterations abort with NumericalFailure.
PhaseOutcome mwu_modified(const ConeInstance& instance, const PhaseConfig& cfg,
                          const NormState& norm);

PhaseOutcome run_phase(const ConeInstance& instance, const PhaseConfig& cfg,
                       const NormState& norm);

} // namespace conic
