#include "conic/phases.hpp"

#include "conic/potential.hpp"
#include "conic/rng.hpp"
#include "conic/stats.hpp"

#include "../support/families.hpp"

#include <doctest.h>

#include <cmath>

using namespace conic;

namespace {

PhaseConfig config_for(PhaseMode mode, double delta) {
    PhaseConfig cfg;
    cfg.mode = mode;
    cfg.delta = delta;
    return cfg;
}

} // namespace

TEST_CASE("classical perceptron") {
    SUBCASE("single constraint is satisfied after one update") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        const PhaseOutcome out =
            classical_perceptron(inst, config_for(PhaseMode::ClassicalPerceptron, 0.01));
        CHECK(out.kind == PhaseOutcome::Kind::Feasible);
        CHECK(out.iterations == 1);
        CHECK(out.x == Vector::Unit(2, 0));
    }
    SUBCASE("planted rho = 0.5 finishes within 1/rho^2 updates") {
        for (std::uint64_t seed : {7, 8, 9, 10}) {
            auto [inst, witness] = generate_planted(2, 4, 0.5, seed);
            const PhaseOutcome out =
                classical_perceptron(inst, config_for(PhaseMode::ClassicalPerceptron, 1e-6));
            CHECK(out.kind == PhaseOutcome::Kind::Feasible);
            CHECK(out.iterations <= 4);
            CHECK((inst.rows() * out.x).minCoeff() > 0.0);
        }
    }
    SUBCASE("near-empty wedge yields evidence, never a feasible claim") {
        const ConeInstance inst = testing::near_antipodal_pair(1e-9);
        PhaseConfig cfg = config_for(PhaseMode::ClassicalPerceptron, 0.05);
        cfg.max_iters = 20000;
        const PhaseOutcome out = classical_perceptron(inst, cfg);
        CHECK(out.kind != PhaseOutcome::Kind::Feasible);
        if (out.kind == PhaseOutcome::Kind::Evidence) {
            CHECK(out.evidence_norm <= 0.05 + 1e-12);
            CHECK(std::abs(out.lambda.sum() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("smooth perceptron") {
    const NormState id2 = NormState::identity(2);
    SUBCASE("single constraint within two iterations") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        const PhaseOutcome out =
            smooth_perceptron(inst, config_for(PhaseMode::SmoothPerceptron, 0.1), id2);
        CHECK(out.kind == PhaseOutcome::Kind::Feasible);
        CHECK(out.iterations <= 2);
    }
    SUBCASE("orthant is fat enough to solve directly") {
        const PhaseOutcome out = smooth_perceptron(
            testing::orthant(2), config_for(PhaseMode::SmoothPerceptron, 0.1), id2);
        CHECK(out.kind == PhaseOutcome::Kind::Feasible);
        CHECK((testing::orthant(2).rows() * out.x).minCoeff() > 0.0);
    }
    SUBCASE("evidence on an instance with an interior dual certificate") {
        const ConeInstance inst = testing::planted_dual_certificate(5, 12, 3);
        const NormState id5 = NormState::identity(5);
        const PhaseOutcome out =
            smooth_perceptron(inst, config_for(PhaseMode::SmoothPerceptron, 0.02), id5);
        REQUIRE(out.kind == PhaseOutcome::Kind::Evidence);
        CHECK(out.evidence_norm <= 0.02 + 1e-12);
        CHECK(out.lambda.minCoeff() >= 0.0);
    }
    SUBCASE("iteration growth in 1/delta is near-linear, not quadratic") {
        const ConeInstance inst = testing::planted_dual_certificate(6, 12, 5);
        const NormState id6 = NormState::identity(6);
        std::vector<double> inv_deltas, iters;
        for (double delta : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
            const PhaseOutcome out =
                smooth_perceptron(inst, config_for(PhaseMode::SmoothPerceptron, delta), id6);
            REQUIRE(out.kind == PhaseOutcome::Kind::Evidence);
            inv_deltas.push_back(1.0 / delta);
            iters.push_back(static_cast<double>(out.iterations) + 1.0);
        }
        const double slope = loglog_slope(inv_deltas, iters);
        CHECK(slope < 1.5);
    }
}

TEST_CASE("standard gradient descent phase") {
    const NormState id2 = NormState::identity(2);
    SUBCASE("orthant first step matches the decrease lemma numbers") {
        const ConeInstance inst = testing::orthant(2);
        const PotentialEval at0 = evaluate(inst, Vector::Zero(2), id2);
        const Vector next = 0.5 * at0.y;
        const PotentialEval at1 = evaluate(inst, next, id2);
        CHECK(std::exp(at1.phi_log) == doctest::Approx(2.0 * std::exp(-0.25)).epsilon(1e-14));
        CHECK(at1.phi_log <= at0.phi_log - at0.norm_y_dual * at0.norm_y_dual / 4.0 + 1e-12);
        CHECK(2.0 * std::exp(-0.25) <= 2.0 * std::exp(-0.125));
    }
    SUBCASE("single row feasible within three steps") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        const PhaseOutcome out =
            mwu_standard(inst, config_for(PhaseMode::MwuStandard, 1e-4), id2);
        CHECK(out.kind == PhaseOutcome::Kind::Feasible);
        CHECK(out.iterations <= 3);
    }
    SUBCASE("delta = 1 certifies immediately at the origin") {
        const ConeInstance inst = testing::orthant(2);
        const PhaseOutcome out = mwu_standard(inst, config_for(PhaseMode::MwuStandard, 1.0), id2);
        CHECK(out.kind == PhaseOutcome::Kind::Evidence);
        CHECK(out.iterations == 0);
        CHECK(out.evidence_norm <= 1.0);
    }
    SUBCASE("per-step inequality enforced over a long planted run") {
        auto [inst, witness] = generate_planted(6, 25, 1e-2, 17);
        PhaseConfig cfg = config_for(PhaseMode::MwuStandard, 1.0 / 60.0);
        cfg.record_rows = true;
        const NormState id6 = NormState::identity(6);
        const PhaseOutcome out = mwu_standard(normalize_rows(inst, id6), cfg, id6);
        CHECK(out.kind != PhaseOutcome::Kind::Exhausted);
        // recheck the recorded rows against the bound
        for (std::size_t i = 1; i < out.rows.size(); ++i) {
            const auto& prev = out.rows[i - 1];
            const auto& cur = out.rows[i];
            CHECK(cur.phi_log <= prev.phi_log - prev.norm_y_dual * prev.norm_y_dual / 4.0 +
                                     1e-9 * std::max(1.0, std::abs(prev.phi_log)));
        }
    }
}

TEST_CASE("modified gradient descent phase") {
    SUBCASE("first orthant step moves along the gradient") {
        const ConeInstance inst = testing::orthant(2);
        const NormState id2 = NormState::identity(2);
        PhaseConfig cfg = config_for(PhaseMode::MwuModified, 1e-3);
        cfg.max_iters = 1;
        cfg.record_rows = true;
        const PhaseOutcome out = mwu_modified(inst, cfg, id2);
        CHECK(out.kind == PhaseOutcome::Kind::Exhausted);
        REQUIRE(out.rows.size() == 1);
        CHECK(out.rows[0].epsilon > 0.0);
        CHECK(out.rows[0].epsilon <= 0.5);
    }
    SUBCASE("single row is solved quickly with a strictly decreasing monitor") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        const NormState id2 = NormState::identity(2);
        PhaseConfig cfg = config_for(PhaseMode::MwuModified, 1e-4);
        cfg.record_rows = true;
        const PhaseOutcome out = mwu_modified(inst, cfg, id2);
        CHECK(out.kind == PhaseOutcome::Kind::Feasible);
        CHECK(out.iterations <= 50);
        for (std::size_t i = 1; i < out.rows.size(); ++i) {
            const double prev =
                std::log(out.rows[i - 1].norm_y_dual) + 2.0 * out.rows[i - 1].phi_log;
            const double cur = std::log(out.rows[i].norm_y_dual) + 2.0 * out.rows[i].phi_log;
            CHECK(cur < prev - 1e-12);
        }
    }
    SUBCASE("monitored quantity strictly decreases on planted instances") {
        for (std::uint64_t seed : {1, 2, 3}) {
            auto [inst, witness] = generate_planted(8, 20, 1e-2, seed);
            const NormState id8 = NormState::identity(8);
            PhaseConfig cfg = config_for(PhaseMode::MwuModified, 1.0 / 80.0);
            cfg.record_rows = true;
            const PhaseOutcome out = mwu_modified(normalize_rows(inst, id8), cfg, id8);
            CHECK(out.kind != PhaseOutcome::Kind::Exhausted);
            REQUIRE(out.rows.size() >= 2);
            for (std::size_t i = 1; i < out.rows.size(); ++i) {
                const double prev =
                    std::log(out.rows[i - 1].norm_y_dual) + 2.0 * out.rows[i - 1].phi_log;
                const double cur =
                    std::log(out.rows[i].norm_y_dual) + 2.0 * out.rows[i].phi_log;
                CHECK(cur < prev - 1e-12);
            }
            CHECK(out.monitored_mean_drop > 0.0);
        }
    }
    SUBCASE("feasible returns carry strictly positive margins") {
        for (PhaseMode mode : {PhaseMode::SmoothPerceptron, PhaseMode::MwuStandard,
                               PhaseMode::MwuModified}) {
            auto [inst, witness] = generate_planted(4, 10, 0.05, 77);
            const NormState id4 = NormState::identity(4);
            const ConeInstance normalized = normalize_rows(inst, id4);
            const PhaseOutcome out = run_phase(normalized, config_for(mode, 1.0 / 40.0), id4);
            if (out.kind == PhaseOutcome::Kind::Feasible)
                CHECK((normalized.rows() * out.x).minCoeff() > 0.0);
        }
    }
    SUBCASE("classical under a non-trivial norm is rejected") {
        const ConeInstance inst = testing::orthant(2);
        const NormState h = NormState::from_matrix(2.0 * Matrix::Identity(2, 2));
        CHECK_THROWS_AS(run_phase(inst, config_for(PhaseMode::ClassicalPerceptron, 0.1), h),
                        InvalidArgument);
    }
}
