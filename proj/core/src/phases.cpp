#include "conic/phases.hpp"

#include "conic/direction.hpp"
#include "conic/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace conic {

namespace {

bool strictly_feasible(const ConeInstance& instance, const Vector& x) {
    return (instance.rows() * x).minCoeff() > 0.0;
}

// Independent recheck of an evidence outcome before it leaves a phase.
void reverify_evidence(const ConeInstance& instance, const NormState& norm,
                       const Vector& lambda, double delta) {
    double l1 = 0.0;
    for (int i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < -1e-15) throw NumericalFailure("evidence lambda has negative weight");
        l1 += lambda[i];
    }
    if (std::abs(l1 - 1.0) > 1e-12)
        throw NumericalFailure("evidence lambda does not sum to 1");
    const double achieved = norm.dual_norm(instance.rows().transpose() * lambda);
    if (achieved > delta + 1e-12) {
        std::ostringstream oss;
        oss << "evidence recheck failed: ||lambda A|| = " << achieved << " > delta = " << delta;
        throw NumericalFailure(oss.str());
    }
}

PhaseOutcome& finish_feasible(PhaseOutcome& out, Vector x, long iterations) {
    out.kind = PhaseOutcome::Kind::Feasible;
    out.x = std::move(x);
    out.iterations = iterations;
    return out;
}

PhaseOutcome& finish_evidence(PhaseOutcome& out, const ConeInstance& instance,
                              const NormState& norm, Vector lambda, double delta,
                              long iterations) {
    reverify_evidence(instance, norm, lambda, delta);
    out.kind = PhaseOutcome::Kind::Evidence;
    out.lambda = std::move(lambda);
    out.evidence_norm = norm.dual_norm(instance.rows().transpose() * out.lambda);
    out.iterations = iterations;
    return out;
}

Vector smoothed_weights(const ConeInstance& instance, const Vector& x, double mu) {
    const Vector exponents = -(instance.rows() * x) / mu;
    const double shift = exponents.maxCoeff();
    const Vector scaled = (exponents.array() - shift).exp();
    return scaled / scaled.sum();
}

void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
}

} // namespace

long default_phase_iteration_cap(PhaseMode mode, int n, int m, double delta) {
    const double logm = std::log(static_cast<double>(m) + 2.0);
    switch (mode) {
    case PhaseMode::ClassicalPerceptron:
        return 500000;
    case PhaseMode::SmoothPerceptron:
        return static_cast<long>(std::ceil(100.0 * (1.0 + std::sqrt(logm)) / delta)) + 1000;
    case PhaseMode::MwuStandard:
        return static_cast<long>(std::ceil(8.0 * logm / (delta * delta))) + 1000;
    case PhaseMode::MwuModified:
        return 2000 + static_cast<long>(std::ceil(60.0 * n * padded_log2(n) * logm));
    }
    return 100000;
}

PhaseOutcome classical_perceptron(const ConeInstance& instance, const PhaseConfig& cfg) {
    require(cfg.delta > 0.0, "classical_perceptron: delta must be positive");
    const int n = instance.dim();
    const int m = instance.row_count();
    const NormState id = NormState::identity(n);
    const long cap = cfg.max_iters > 0
                         ? cfg.max_iters
                         : default_phase_iteration_cap(cfg.mode, n, m, cfg.delta);

    PhaseOutcome out;
    Vector x = Vector::Zero(n);
    Vector visits = Vector::Zero(m);
    for (long t = 0; t < cap; ++t) {
        const Vector margins = instance.rows() * x;
        if (margins.minCoeff() > 0.0) return finish_feasible(out, x, t);
        // For this walk the running average lambda = visits/t satisfies
        // lambda A = x/t, so the evidence norm is just ||x||/t.
        if (t > 0 && x.norm() / static_cast<double>(t) <= cfg.delta) {
            Vector lambda = visits / static_cast<double>(t);
            return finish_evidence(out, instance, id, std::move(lambda), cfg.delta, t);
        }
        int worst = 0;
        margins.minCoeff(&worst); // ties resolve to the lowest index
        x += instance.rows().row(worst).transpose();
        visits[worst] += 1.0;
        if (cfg.record_rows)
            out.rows.push_back({cfg.phase_index, t,
                                std::numeric_limits<double>::quiet_NaN(),
                                x.norm() / static_cast<double>(t + 1), 1.0, cfg.mode});
    }
    out.kind = PhaseOutcome::Kind::Exhausted;
    out.iterations = cap;
    return out;
}

PhaseOutcome smooth_perceptron(const ConeInstance& instance, const PhaseConfig& cfg,
                               const NormState& norm) {
    require(cfg.delta > 0.0, "smooth_perceptron: delta must be positive");
    const int n = instance.dim();
    const int m = instance.row_count();
    const long cap = cfg.max_iters > 0
                         ? cfg.max_iters
                         : default_phase_iteration_cap(cfg.mode, n, m, cfg.delta);

    PhaseOutcome out;
    Vector x = instance.rows().colwise().mean().transpose();
    double mu = 1.0;
    Vector lambda = smoothed_weights(instance, x, mu);
    for (long k = 0; k < cap; ++k) {
        if (strictly_feasible(instance, x)) return finish_feasible(out, x, k);
        const Vector aggregated = instance.rows().transpose() * lambda;
        const double evidence = norm.dual_norm(aggregated);
        if (evidence <= cfg.delta)
            return finish_evidence(out, instance, norm, lambda, cfg.delta, k);

        const double theta = 2.0 / static_cast<double>(k + 3);
        const Vector smoothed = instance.rows().transpose() * smoothed_weights(instance, x, mu);
        if (norm.is_identity()) {
            x = (1.0 - theta) * (x + theta * aggregated) + theta * theta * mu * smoothed;
        } else {
            // The dual map H^-1 keeps the scheme the Euclidean one seen in
            // the H^{1/2} frame.
            x = (1.0 - theta) * (x + theta * (norm.inverse() * aggregated)) +
                theta * theta * mu * (norm.inverse() * smoothed);
        }
        mu *= (1.0 - theta);
        lambda = (1.0 - theta) * lambda + theta * smoothed_weights(instance, x, mu);
        lambda /= lambda.sum();
        if (cfg.record_rows)
            out.rows.push_back({cfg.phase_index, k,
                                std::numeric_limits<double>::quiet_NaN(), evidence, theta,
                                cfg.mode});
    }
    out.kind = PhaseOutcome::Kind::Exhausted;
    out.iterations = cap;
    return out;
}

PhaseOutcome mwu_standard(const ConeInstance& instance, const PhaseConfig& cfg,
                          const NormState& norm) {
    require(cfg.delta > 0.0, "mwu_standard: delta must be positive");
    const int n = instance.dim();
    const int m = instance.row_count();
    const long cap = cfg.max_iters > 0
                         ? cfg.max_iters
                         : default_phase_iteration_cap(cfg.mode, n, m, cfg.delta);
    const double termination = cfg.fixed_step
                                   ? std::min(cfg.termination_phi_log,
                                              -std::log(static_cast<double>(m)))
                                   : cfg.termination_phi_log;

    PhaseOutcome out;
    out.min_phi_log = std::numeric_limits<double>::infinity();
    Vector x = Vector::Zero(n);

    bool have_pending = false;
    double pending_bound = 0.0; // upper bound on the next phi_log
    double pending_scale = 1.0;

    for (long t = 0; t < cap; ++t) {
        const PotentialEval eval = evaluate(instance, x, norm);
        out.min_phi_log = std::min(out.min_phi_log, eval.phi_log);
        if (have_pending && eval.phi_log > pending_bound + 1e-9 * pending_scale) {
            std::ostringstream oss;
            oss << "mwu_standard: potential decrease bound violated at iteration " << t
                << ": phi_log = " << eval.phi_log << " > bound = " << pending_bound;
            throw NumericalFailure(oss.str());
        }
        if (cfg.record_rows)
            out.rows.push_back({cfg.phase_index, t, eval.phi_log, eval.norm_y_dual,
                                cfg.fixed_step ? 1.0 / (2.0 * n) : 0.5, cfg.mode});
        if (eval.phi_log < termination && strictly_feasible(instance, x))
            return finish_feasible(out, x, t);
        if (eval.norm_y_dual <= cfg.delta)
            return finish_evidence(out, instance, norm, eval.lambda, cfg.delta, t);

        if (cfg.fixed_step) {
            // Fixed-step variant: epsilon = 1/(2n) along the unit-H gradient
            // direction; checked against the generic decrease bound.
            Vector p = norm.is_identity() ? Vector(eval.y) : Vector(norm.inverse() * eval.y);
            p /= norm.norm(p);
            const double eps = 1.0 / (2.0 * static_cast<double>(n));
            const double inner_yp = eval.y.dot(p);
            const double curvature =
                (eval.lambda.array() * (instance.rows() * p).array().square()).sum();
            pending_bound =
                eval.phi_log + std::log(1.0 - eps * inner_yp + eps * eps * curvature);
            pending_scale = std::max(1.0, std::abs(eval.phi_log));
            have_pending = true;
            x += eps * p;
        } else {
            // x <- x + H^-1 y / 2; next evaluation must obey
            // Phi(x + y/2) <= Phi(x) e^{-||y||^2/4} in log domain.
            pending_bound = eval.phi_log - eval.norm_y_dual * eval.norm_y_dual / 4.0;
            pending_scale = std::max(1.0, std::abs(eval.phi_log));
            have_pending = true;
            if (norm.is_identity())
                x += 0.5 * eval.y;
            else
                x += 0.5 * (norm.inverse() * eval.y);
        }
    }
    out.kind = PhaseOutcome::Kind::Exhausted;
    out.iterations = cap;
    return out;
}

PhaseOutcome mwu_modified(const ConeInstance& instance, const PhaseConfig& cfg,
                          const NormState& norm) {
    require(cfg.delta > 0.0, "mwu_modified: delta must be positive");
    const int n = instance.dim();
    const int m = instance.row_count();
    const long cap = cfg.max_iters > 0
                         ? cfg.max_iters
                         : default_phase_iteration_cap(cfg.mode, n, m, cfg.delta);
    const int depth = eigen_split_depth(n);

    PhaseOutcome out;
    out.min_phi_log = std::numeric_limits<double>::infinity();
    Vector x = Vector::Zero(n);

    bool have_pending = false;
    double pending_phi_bound = 0.0;
    double pending_grad_bound = 0.0; // bound on log(Phi * ||y||) after the step
    double pending_scale = 1.0;

    double prev_monitored = std::numeric_limits<double>::infinity();
    bool have_monitored = false;
    int non_decreasing_streak = 0;
    double drop_sum = 0.0;
    long drop_count = 0;

    const auto attach_drop = [&](PhaseOutcome& o) -> PhaseOutcome& {
        o.monitored_mean_drop =
            drop_count > 0 ? drop_sum / static_cast<double>(drop_count) : 0.0;
        return o;
    };

    for (long t = 0; t < cap; ++t) {
        const PotentialEval eval = evaluate(instance, x, norm);
        out.min_phi_log = std::min(out.min_phi_log, eval.phi_log);
        if (have_pending) {
            if (eval.phi_log > pending_phi_bound + 1e-9 * pending_scale) {
                std::ostringstream oss;
                oss << "mwu_modified: potential bound violated at iteration " << t << ": "
                    << eval.phi_log << " > " << pending_phi_bound;
                throw NumericalFailure(oss.str());
            }
            const double grad_log = eval.phi_log + std::log(eval.norm_y_dual);
            if (grad_log > pending_grad_bound + 1e-9 * std::max(1.0, std::abs(grad_log))) {
                std::ostringstream oss;
                oss << "mwu_modified: gradient-norm bound violated at iteration " << t << ": "
                    << grad_log << " > " << pending_grad_bound;
                throw NumericalFailure(oss.str());
            }
        }
        if (eval.phi_log < cfg.termination_phi_log && strictly_feasible(instance, x))
            return attach_drop(finish_feasible(out, x, t));
        if (eval.norm_y_dual <= cfg.delta)
            return attach_drop(
                finish_evidence(out, instance, norm, eval.lambda, cfg.delta, t));

        // Monitored product log||y|| + 2 log Phi must strictly decrease while
        // the phase keeps stepping.
        const double monitored = std::log(eval.norm_y_dual) + 2.0 * eval.phi_log;
        if (have_monitored) {
            if (monitored >= prev_monitored - 1e-12) {
                if (++non_decreasing_streak >= 3) {
                    std::ostringstream oss;
                    oss << "mwu_modified: monitored quantity failed to decrease for 3 "
                        << "consecutive iterations (t = " << t << ", value = " << monitored
                        << ")";
                    throw NumericalFailure(oss.str());
                }
            } else {
                non_decreasing_streak = 0;
            }
            drop_sum += prev_monitored - monitored;
            ++drop_count;
        }
        prev_monitored = monitored;
        have_monitored = true;

        const SecondMoment moment = second_moment(instance, eval.lambda);
        const DirectionChoice choice = choose_direction(eval.y, moment, norm, depth);
        const double eps = choose_step(eval.y, choice.p, moment, norm, cfg.log_exponent_a);

        const double inner_yp = eval.y.dot(choice.p);
        const double curvature = choice.p.dot(moment.m * choice.p);
        const Vector mp = moment.m * choice.p;
        const double mp_dual = norm.dual_norm(mp);
        const double inner_y_mp_dual =
            norm.is_identity() ? eval.y.dot(mp) : eval.y.dot(norm.inverse() * mp);
        const double g = eval.norm_y_dual;

        pending_phi_bound =
            eval.phi_log + std::log(1.0 - eps * inner_yp + eps * eps * curvature);
        const double grad_factor = 1.0 + eps * eps * curvature / g +
                                   (-eps * inner_y_mp_dual + eps * eps * mp_dual * mp_dual) /
                                       (g * g);
        pending_grad_bound = eval.phi_log + std::log(g) + std::log(grad_factor);
        pending_scale = std::max(1.0, std::abs(eval.phi_log));
        have_pending = true;

        if (cfg.record_rows)
            out.rows.push_back({cfg.phase_index, t, eval.phi_log, eval.norm_y_dual, eps,
                                cfg.mode});
        x += eps * choice.p;
    }
    out.kind = PhaseOutcome::Kind::Exhausted;
    out.iterations = cap;
    return attach_drop(out);
}

PhaseOutcome run_phase(const ConeInstance& instance, const PhaseConfig& cfg,
                       const NormState& norm) {
    switch (cfg.mode) {
    case PhaseMode::ClassicalPerceptron:
        if (!norm.is_identity())
            throw InvalidArgument("classical perceptron requires Euclidean geometry");
        return classical_perceptron(instance, cfg);
    case PhaseMode::SmoothPerceptron:
        return smooth_perceptron(instance, cfg, norm);
    case PhaseMode::MwuStandard:
        return mwu_standard(instance, cfg, norm);
    case PhaseMode::MwuModified:
        return mwu_modified(instance, cfg, norm);
    }
    throw InvalidArgument("run_phase: unknown mode");
}

} // namespace conic
