#include "conic/rescale.hpp"

#include "conic/mc.hpp"
#include "conic/potential.hpp"
#include "conic/rng.hpp"

#include "../support/families.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace conic;

TEST_CASE("width estimates on the orthant") {
    const ConeInstance inst = testing::orthant(2);
    SUBCASE("axis direction") {
        const WidthEstimate w = estimate_width(inst, Vector::Unit(2, 0), 40000, 1);
        CHECK(w.estimate > 0.9);
        CHECK(w.estimate <= 1.0);
        CHECK(w.accepted > 8000);
    }
    SUBCASE("diagonal direction attains the supremum inside") {
        Vector c(2);
        c << 1, 1;
        const WidthEstimate w = estimate_width(inst, c, 40000, 2);
        CHECK(w.estimate > 0.9);
        CHECK(w.estimate <= 1.0);
    }
    SUBCASE("estimates never exceed 1") {
        auto stream = make_stream(3, "width-cap");
        for (int trial = 0; trial < 5; ++trial) {
            auto [inst2, w2] = generate_planted(3, 8, 0.2, 70 + trial);
            const Vector c = sample_unit_sphere(3, stream);
            CHECK(estimate_width(inst2, c, 5000, trial).estimate <= 1.0);
        }
    }
    SUBCASE("empty cone reports no accepted samples") {
        CHECK_THROWS_AS(estimate_width(testing::antipodal_pair(), Vector::Unit(2, 0), 2000, 4),
                        NumericalFailure);
    }
}

TEST_CASE("gaussian subset direction") {
    SUBCASE("orthonormal rows pass the threshold whenever the subset is non-empty") {
        const ConeInstance inst = testing::orthant(4);
        const Vector lambda = Vector::Constant(4, 0.25);
        // ||sum_J lambda_i e_i|| = sqrt(|J|)/4 >= 1/4 > 1/(4 sqrt(4 pi))
        const SubsetDirection dir = gaussian_subset_direction(inst, lambda, 5);
        CHECK(dir.retries == 0);
        CHECK(dir.c.norm() >= 1.0 / (4.0 * std::sqrt(4.0 * M_PI)));
        CHECK_FALSE(dir.subset.empty());
    }
    SUBCASE("single row succeeds immediately via the sign complement") {
        const ConeInstance inst = testing::single_row(Vector::Unit(3, 0));
        const SubsetDirection dir = gaussian_subset_direction(inst, Vector::Ones(1), 6);
        CHECK(dir.retries == 0);
        CHECK(dir.c.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("single-draw success frequency is at least 1/4") {
        auto stream = make_stream(8, "gauss-freq");
        int successes = 0;
        const int trials = 150;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 4 + 4 * (trial % 3); // 4, 8, 12
            const int m = n + 6;
            Matrix rows(m, n);
            for (int i = 0; i < m; ++i)
                rows.row(i) = sample_unit_sphere(n, stream).transpose();
            const ConeInstance inst{rows};
            const Vector lambda = sample_simplex(m, stream);
            const SubsetDirection dir = gaussian_subset_direction(inst, lambda, 900 + trial);
            if (dir.retries == 0) ++successes;
        }
        CHECK(static_cast<double>(successes) / trials >= 0.25);
    }
}

TEST_CASE("derandomized direction") {
    SUBCASE("single basis row pins the matching coordinate at the grid edge") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        const SubsetDirection dir = derandomized_direction(inst, Vector::Ones(1));
        CHECK(dir.g[0] == 3.0);
        CHECK(dir.g[1] == 0.0);
        const double f = std::abs(dir.g[0]) -
                         dir.g.norm() / (10.0 * std::sqrt(2.0));
        CHECK(f > 0.0);
    }
    SUBCASE("orthonormal rows reach the guaranteed norm") {
        for (int n : {3, 6, 10}) {
            const ConeInstance inst = testing::orthant(n);
            const Vector lambda = Vector::Constant(n, 1.0 / n);
            const SubsetDirection dir = derandomized_direction(inst, lambda);
            CHECK(dir.c.norm() >= 1.0 / (20.0 * std::sqrt(static_cast<double>(n))));
            const Vector v = dir.g / dir.g.norm();
            CHECK((lambda.array() * (inst.rows() * v).array().abs()).sum() >=
                  1.0 / (10.0 * std::sqrt(static_cast<double>(n))));
        }
    }
    SUBCASE("bitwise deterministic") {
        auto stream = make_stream(9, "derand-det");
        Matrix rows(7, 5);
        for (int i = 0; i < 7; ++i) rows.row(i) = sample_unit_sphere(5, stream).transpose();
        const ConeInstance inst{rows};
        const Vector lambda = sample_simplex(7, stream);
        const SubsetDirection a = derandomized_direction(inst, lambda);
        const SubsetDirection b = derandomized_direction(inst, lambda);
        CHECK(a.g == b.g);
        CHECK(a.c == b.c);
        CHECK(a.subset == b.subset);
    }
    SUBCASE("hard lower bound over random draws") {
        auto stream = make_stream(10, "derand-draws");
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 2 + static_cast<int>(uni(stream) * 15);
            const int m = 1 + static_cast<int>(uni(stream) * 20);
            Matrix rows(m, n);
            for (int i = 0; i < m; ++i)
                rows.row(i) = sample_unit_sphere(n, stream).transpose();
            const ConeInstance inst{rows};
            const Vector lambda = sample_simplex(m, stream);
            const SubsetDirection dir = derandomized_direction(inst, lambda);
            const Vector v = dir.g / dir.g.norm();
            CHECK((lambda.array() * (inst.rows() * v).array().abs()).sum() >=
                  1.0 / (10.0 * std::sqrt(static_cast<double>(n))));
        }
    }
}

namespace {

// Two nearly antipodal rows plus an orthogonal one; lambda rides the pair, so
// ||lambda A|| is tiny and e1 is a legitimate thin direction.
struct Rank1Fixture {
    ConeInstance instance;
    Vector lambda;
};

Rank1Fixture rank1_fixture() {
    Matrix rows(3, 2);
    rows.row(0) << 1.0, 0.0;
    rows.row(1) << -1.0, 0.1;
    rows.row(1).normalize();
    rows.row(2) << 0.0, 1.0;
    Vector lambda(3);
    lambda << 0.5, 0.5, 0.0;
    return {ConeInstance(rows), lambda};
}

} // namespace

TEST_CASE("rank-1 rescale") {
    SUBCASE("halves the thin component and renormalizes") {
        auto fix = rank1_fixture();
        const RescaleOutcome out = rank1_rescale(fix.instance, Vector::Unit(2, 0), fix.lambda);
        // row (1,0) maps to (1/2,0) and renormalizes back to (1,0)
        CHECK(out.instance.rows().row(0).isApprox(Vector::Unit(2, 0).transpose(), 1e-14));
        // the orthogonal row (0,1) is untouched
        CHECK(out.instance.rows().row(2).isApprox(Vector::Unit(2, 1).transpose(), 1e-14));
        CHECK(out.report.kind == RescaleReport::Kind::Rank1);
        CHECK(out.report.det_growth_log == doctest::Approx(std::log(2.0)));
        CHECK(out.report.width_bound <= 1.0 / (3.0 * std::sqrt(2.0)));
        CHECK(std::holds_alternative<Rank1Step>(out.step));
    }
    SUBCASE("precondition rejection carries the measured bound") {
        const ConeInstance inst = testing::single_row(Vector::Unit(2, 0));
        CHECK_THROWS_AS(rank1_rescale(inst, Vector::Unit(2, 0), Vector::Ones(1)),
                        PreconditionViolation);
    }
    SUBCASE("feasibility transfers through pull_back") {
        auto fix = rank1_fixture();
        const RescaleOutcome out = rank1_rescale(fix.instance, Vector::Unit(2, 0), fix.lambda);
        TransformLog log;
        log.push(out.step);
        auto stream = make_stream(11, "rank1-transfer");
        for (int trial = 0; trial < 60; ++trial) {
            const Vector xp = sample_unit_ball(2, stream);
            const bool feas_new = (out.instance.rows() * xp).minCoeff() > 0.0;
            const bool feas_old = (fix.instance.rows() * pull_back(xp, log)).minCoeff() > 0.0;
            CHECK(feas_new == feas_old);
        }
    }
    SUBCASE("volume fraction grows on a thin slab") {
        const auto slab = testing::thin_slab(0.02, 4, 21);
        const SubsetDirection dir = gaussian_subset_direction(slab.instance, slab.pinch_lambda, 3);
        const RescaleOutcome out = rank1_rescale(slab.instance, dir.c, slab.pinch_lambda);
        const NormState id = NormState::identity(3);
        const McEstimate before = mc_volume_fraction(slab.instance, id, 200000, 31);
        const McEstimate after = mc_volume_fraction(out.instance, id, 200000, 32);
        CHECK(after.estimate >= 1.2 * before.estimate);
    }
}

TEST_CASE("width subset bound holds against the MC oracle") {
    for (std::uint64_t seed : {40, 41, 42}) {
        const auto slab = testing::thin_slab(0.03, 3, seed);
        const SubsetDirection dir =
            gaussian_subset_direction(slab.instance, slab.pinch_lambda, seed);
        const Vector combo = slab.instance.rows().transpose() * slab.pinch_lambda;
        const double bound = combo.norm() / dir.c.norm();
        const WidthEstimate west = estimate_width(slab.instance, dir.c, 60000, seed + 1);
        CHECK(west.estimate <= bound + 3.0 * west.std_error + 1e-12);
    }
}

TEST_CASE("multi-rank rescale") {
    SUBCASE("determinant identity for the isotropic moment") {
        // det(I + alpha I/3) at alpha = 1 is (4/3)^3 >= e^{1/2}
        const double log_det = 3.0 * std::log(4.0 / 3.0);
        CHECK(std::exp(log_det) == doctest::Approx(std::pow(4.0 / 3.0, 3)).epsilon(1e-15));
        CHECK(log_det >= 0.5);
    }
    SUBCASE("alpha selection from the operator norm") {
        // rows = I_3, uniform lambda: M = I/3, delta_max = 1/3, alpha = 3
        const ConeInstance inst = testing::orthant(3);
        const SecondMoment moment = second_moment(inst, Vector::Constant(3, 1.0 / 3.0));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(moment.m);
        const double delta_max = eig.eigenvalues().maxCoeff();
        CHECK(delta_max == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(std::min(1.0 / delta_max, kDefaultAlphaCap) == doctest::Approx(3.0));
    }
    SUBCASE("precondition rejection") {
        const ConeInstance inst = testing::orthant(3);
        CHECK_THROWS_AS(multirank_rescale(inst, Vector::Constant(3, 1.0 / 3.0)),
                        PreconditionViolation);
    }
    SUBCASE("valid rescale: growth bound, map, and image bound") {
        const auto slab = testing::thin_slab(0.015, 4, 50);
        const Vector combo = slab.instance.rows().transpose() * slab.pinch_lambda;
        REQUIRE(combo.norm() <= 1.0 / 30.0);
        const RescaleOutcome out = multirank_rescale(slab.instance, slab.pinch_lambda);
        CHECK(out.report.kind == RescaleReport::Kind::MultiRank);
        CHECK(out.report.alpha >= 1.0);
        CHECK(out.report.det_growth_log >= out.report.alpha / 4.0 - 1e-9);

        // ||F x||^2 <= 1 + alpha ||lambda A|| for x in P cap B
        const auto& step = std::get<MultiRankStep>(out.step);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(
            Matrix::Identity(3, 3) + step.alpha * step.m);
        const Matrix forward = eig.operatorSqrt();
        auto stream = make_stream(12, "multirank-image");
        int inside = 0;
        for (int trial = 0; trial < 200000 && inside < 200; ++trial) {
            const Vector x = sample_unit_ball(3, stream);
            if ((slab.instance.rows() * x).minCoeff() <= 0.0) continue;
            ++inside;
            CHECK((forward * x).squaredNorm() <=
                  1.0 + step.alpha * combo.norm() + 1e-9);
        }
        CHECK(inside >= 100);

        // feasibility equivalence under the recorded step
        TransformLog log;
        log.push(out.step);
        for (int trial = 0; trial < 40; ++trial) {
            const Vector xp = sample_unit_ball(3, stream);
            CHECK(((out.instance.rows() * xp).minCoeff() > 0.0) ==
                  ((slab.instance.rows() * pull_back(xp, log)).minCoeff() > 0.0));
        }
    }
}

TEST_CASE("norm update") {
    SUBCASE("isotropic arithmetic: H = I, M = I/2 gives H~ = 2I") {
        // delta_max = ||H^-1 M||_op = 1/2, alpha = 2, H~ = I + 2 (I/2) = 2I
        const ConeInstance inst = testing::orthant(2);
        const SecondMoment moment = second_moment(inst, Vector::Constant(2, 0.5));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(moment.m);
        const double alpha = std::min(1.0 / eig.eigenvalues().maxCoeff(), kDefaultAlphaCap);
        CHECK(alpha == doctest::Approx(2.0));
        CHECK((Matrix::Identity(2, 2) + alpha * moment.m).isApprox(2.0 * Matrix::Identity(2, 2),
                                                                   1e-14));
    }
    SUBCASE("precondition rejection") {
        const ConeInstance inst = testing::orthant(2);
        CHECK_THROWS_AS(norm_update(NormState::identity(2), Vector::Constant(2, 0.5), inst),
                        PreconditionViolation);
    }
    SUBCASE("valid update: SPD, coefficient log, and mu growth") {
        const auto slab = testing::thin_slab(0.02, 4, 60);
        const NormState id = NormState::identity(3);
        const ConeInstance normalized = normalize_rows(slab.instance, id);
        const NormUpdateOutcome out =
            norm_update(id, slab.pinch_lambda, normalized);
        CHECK(out.report.kind == RescaleReport::Kind::NormUpdate);
        CHECK(out.norm.min_eigenvalue() > 0.0);
        CHECK(out.report.det_growth_log >= out.report.alpha / 4.0 - 1e-9);

        // reconstruction: I + sum h_i a_i a_i' over original rows
        Matrix rebuilt = Matrix::Identity(3, 3);
        for (int i = 0; i < normalized.row_count(); ++i) {
            const Vector row = normalized.original_rows().row(i).transpose();
            rebuilt += out.norm.coefficients()[i] * row * row.transpose();
        }
        CHECK((rebuilt - out.norm.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

        // rows of the updated instance are dual-unit under the new norm
        for (int i = 0; i < out.instance.row_count(); ++i)
            CHECK(std::abs(out.norm.dual_norm(out.instance.rows().row(i).transpose()) - 1.0) <=
                  1e-12);

        // mu(H) grows: fraction of B_H inside the cone
        const McEstimate before = mc_volume_fraction(normalized, id, 400000, 71);
        const McEstimate after = mc_volume_fraction(out.instance, out.norm, 400000, 72);
        CHECK(after.estimate >
              before.estimate + 3.0 * (before.std_error + after.std_error));
    }
    SUBCASE("rejects transformed instances") {
        auto fix = rank1_fixture();
        const RescaleOutcome transformed =
            rank1_rescale(fix.instance, Vector::Unit(2, 0), fix.lambda);
        Vector lambda = Vector::Zero(3);
        lambda[2] = 1.0;
        CHECK_THROWS_AS(
            norm_update(NormState::identity(2), lambda, transformed.instance),
            InvalidArgument);
    }
}
