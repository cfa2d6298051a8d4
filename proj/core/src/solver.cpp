#include "conic/solver.hpp"

#include "conic/potential.hpp"
#include "conic/rng.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace conic {

namespace {

void validate_config(const SolveConfig& cfg) {
    if (cfg.phase_mode == PhaseMode::ClassicalPerceptron &&
        cfg.rescale_mode == RescaleMode::NormUpdate)
        throw InvalidArgument("classical perceptron cannot run under an evolving norm");
    if (cfg.rho_hint && !(*cfg.rho_hint > 0.0 && *cfg.rho_hint < 1.0))
        throw InvalidArgument("rho_hint must lie in (0, 1)");
    if (!(cfg.alpha_cap > 0.0)) throw InvalidArgument("alpha_cap must be positive");
}

std::string exhausted_summary(long phases, long iterations, double min_phi_log,
                              double last_evidence, bool phase_exhausted) {
    std::ostringstream oss;
    if (phase_exhausted)
        oss << "phase " << phases << " exhausted its iteration budget";
    else
        oss << "phase budget exhausted after " << phases << " phases";
    oss << " (" << iterations << " total iterations, min log Phi = " << min_phi_log;
    if (last_evidence >= 0.0) oss << ", last evidence norm = " << last_evidence;
    oss << "); likely infeasible or rho below threshold";
    return oss.str();
}

} // namespace

long phase_budget(const SolveConfig& cfg, int n) {
    if (cfg.max_phases > 0) return cfg.max_phases;
    if (cfg.rho_hint)
        return static_cast<long>(
            std::ceil(8.0 * static_cast<double>(n) * std::log(1.0 / *cfg.rho_hint)));
    return 10000;
}

bool roundedness_check(const ConeInstance& final_instance, const Vector& z, long t) {
    if (z.size() != final_instance.dim())
        throw InvalidArgument("roundedness_check: dimension mismatch");
    for (int i = 0; i < final_instance.row_count(); ++i) {
        if (std::abs(final_instance.rows().row(i).norm() - 1.0) > 1e-6)
            throw InvalidArgument("roundedness_check: rows must be Euclidean-unit");
    }
    if (t <= 0) return false;
    const double inner = 1.0 / static_cast<double>(t);
    return (final_instance.rows() * z).minCoeff() >= inner - 1e-12 &&
           z.norm() <= 0.5 + 1e-12;
}

SolveResult solve(const ConeInstance& instance, const SolveConfig& cfg) {
    validate_config(cfg);
    const int n = instance.dim();
    const double delta = evidence_threshold(cfg.rescale_mode, n);
    const long budget = phase_budget(cfg, n);
    const bool want_roundedness = cfg.termination_phi_log <= -1.0 || cfg.fixed_step;

    SolveResult result;
    result.delta = delta;
    result.final_norm = NormState::identity(n);

    ConeInstance working = instance;
    NormState norm = NormState::identity(n);
    double min_phi_log = std::numeric_limits<double>::infinity();
    double last_evidence = -1.0;

    for (long phase = 1; phase <= budget; ++phase) {
        working = normalize_rows(working, norm);

        PhaseConfig pc;
        pc.delta = delta;
        pc.max_iters = cfg.max_iters_per_phase;
        pc.mode = cfg.phase_mode;
        pc.log_exponent_a = cfg.log_exponent_a;
        pc.seed = cfg.seed;
        pc.termination_phi_log = cfg.termination_phi_log;
        pc.fixed_step = cfg.fixed_step;
        pc.record_rows = cfg.record_trace;
        pc.phase_index = static_cast<int>(phase);

        PhaseOutcome outcome = run_phase(working, pc, norm);
        result.phases_used = phase;
        result.total_iterations += outcome.iterations;
        result.phase_iterations.push_back(outcome.iterations);
        min_phi_log = std::min(min_phi_log, outcome.min_phi_log);
        if (cfg.record_trace)
            result.trace.insert(result.trace.end(), outcome.rows.begin(), outcome.rows.end());

        if (outcome.kind == PhaseOutcome::Kind::Feasible) {
            const Vector x_original = pull_back(outcome.x, result.transforms);
            Certificate cert;
            cert.value = FeasiblePoint{x_original};
            cert.transforms = result.transforms;
            cert.norm_coefficients = norm.coefficients();
            const VerificationReport report = verify_certificate(instance, cert);
            if (!report.pass)
                throw NumericalFailure(
                    "solve: feasible phase output failed verification in original "
                    "coordinates (margin " +
                    std::to_string(report.feasibility_margin) + ")");

            if (want_roundedness) {
                const long t = outcome.iterations;
                const double min_margin = (working.rows() * outcome.x).minCoeff();
                if (min_margin < 1.0 - 1e-9)
                    throw NumericalFailure(
                        "solve: termination margins below 1 in the final phase");
                if (outcome.x.norm() > 0.5 * static_cast<double>(t) * (1.0 + 1e-12))
                    throw NumericalFailure("solve: final iterate longer than T/2");
                RoundednessReport r;
                r.t = t;
                r.z = outcome.x / static_cast<double>(t);
                r.inner_radius = 1.0 / static_cast<double>(t);
                r.outer_radius_bound = 1.0 + r.z.norm();
                r.ratio = r.outer_radius_bound * static_cast<double>(t);
                result.roundedness = std::move(r);
            }

            result.certificate = std::move(cert);
            result.final_norm = norm;
            result.final_instance = std::move(working);
            std::ostringstream oss;
            oss << "feasible after " << phase << " phases, " << result.total_iterations
                << " iterations, " << result.rescales << " rescales";
            result.summary = oss.str();
            return result;
        }

        if (outcome.kind == PhaseOutcome::Kind::Evidence) {
            last_evidence = outcome.evidence_norm;
            RescaleReport report;
            switch (cfg.rescale_mode) {
            case RescaleMode::Rank1: {
                SubsetDirection dir;
                if (cfg.derandomize) {
                    dir = derandomized_direction(working, outcome.lambda);
                } else {
                    std::ostringstream label;
                    label << "gaussian-phase-" << phase;
                    dir = gaussian_subset_direction(working, outcome.lambda,
                                                    derive_seed(cfg.seed, label.str()));
                }
                RescaleOutcome rescaled = rank1_rescale(working, dir.c, outcome.lambda);
                working = std::move(rescaled.instance);
                result.transforms.push(std::move(rescaled.step));
                report = rescaled.report;
                report.retries = dir.retries;
                report.derandomized = dir.derandomized;
                break;
            }
            case RescaleMode::MultiRank: {
                RescaleOutcome rescaled =
                    multirank_rescale(working, outcome.lambda, cfg.alpha_cap);
                working = std::move(rescaled.instance);
                result.transforms.push(std::move(rescaled.step));
                report = rescaled.report;
                break;
            }
            case RescaleMode::NormUpdate: {
                NormUpdateOutcome updated =
                    norm_update(norm, outcome.lambda, working, cfg.alpha_cap);
                norm = std::move(updated.norm);
                working = std::move(updated.instance);
                report = updated.report;
                break;
            }
            }
            report.phase = static_cast<int>(phase);
            result.det_growth_log_sum += report.det_growth_log;
            result.rescales += 1;
            result.rescale_reports.push_back(std::move(report));
            continue;
        }

        // Phase ran out of iterations.
        Certificate cert;
        cert.value = BudgetExhausted{exhausted_summary(phase, result.total_iterations,
                                                       min_phi_log, last_evidence, true)};
        cert.transforms = result.transforms;
        cert.norm_coefficients = norm.coefficients();
        result.certificate = std::move(cert);
        result.final_norm = norm;
        result.final_instance = std::move(working);
        result.summary = std::get<BudgetExhausted>(result.certificate.value).summary;
        return result;
    }

    Certificate cert;
    cert.value = BudgetExhausted{
        exhausted_summary(budget, result.total_iterations, min_phi_log, last_evidence, false)};
    cert.transforms = result.transforms;
    cert.norm_coefficients = norm.coefficients();
    result.certificate = std::move(cert);
    result.final_norm = norm;
    result.final_instance = normalize_rows(working, norm);
    result.summary = std::get<BudgetExhausted>(result.certificate.value).summary;
    return result;
}

SolveResult john_ellipsoid(const ConeInstance& instance, const SolveConfig& cfg) {
    if (cfg.phase_mode != PhaseMode::MwuStandard && cfg.phase_mode != PhaseMode::MwuModified)
        throw InvalidArgument("john_ellipsoid requires an MWU phase mode");
    if (cfg.rescale_mode == RescaleMode::NormUpdate)
        throw InvalidArgument("john_ellipsoid requires a cone-transforming rescale mode");
    SolveConfig run = cfg;
    run.termination_phi_log = -1.0; // Phi < 1/e
    return solve(instance, run);
}

} // namespace conic
