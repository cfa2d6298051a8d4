#include "conic/rescale.hpp"

#include "conic/potential.hpp"
#include "conic/rng.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <sstream>

namespace conic {

namespace {

void check_lambda(const ConeInstance& instance, const Vector& lambda) {
    if (lambda.size() != instance.row_count())
        throw InvalidArgument("lambda dimension mismatch");
    if (lambda.minCoeff() < -1e-12)
        throw InvalidArgument("lambda must be nonnegative");
    if (std::abs(lambda.sum() - 1.0) > 1e-9)
        throw InvalidArgument("lambda must sum to 1");
}

// E|a + b Z| for Z standard normal (folded-normal mean).
double folded_mean(double a, double b) {
    if (b <= 0.0) return std::abs(a);
    const double r = a / b;
    return b * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * r * r) +
           a * std::erf(r / std::sqrt(2.0));
}

constexpr std::array<double, 13> kCoordinateGrid = {
    0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 2.0, -2.0, 2.5, -2.5, 3.0, -3.0};

SubsetDirection better_sign_split(const ConeInstance& instance, const Vector& lambda,
                                  const Vector& g) {
    const Matrix& a = instance.rows();
    const Vector dots = a * g;
    Vector c_pos = Vector::Zero(instance.dim());
    Vector c_neg = Vector::Zero(instance.dim());
    for (int i = 0; i < instance.row_count(); ++i) {
        if (dots[i] >= 0.0)
            c_pos += lambda[i] * a.row(i).transpose();
        else
            c_neg += lambda[i] * a.row(i).transpose();
    }
    SubsetDirection out;
    out.g = g;
    const bool take_pos = c_pos.norm() >= c_neg.norm();
    out.c = take_pos ? c_pos : c_neg;
    for (int i = 0; i < instance.row_count(); ++i) {
        const bool in_pos = dots[i] >= 0.0;
        if (in_pos == take_pos) out.subset.push_back(i);
    }
    return out;
}

} // namespace

WidthEstimate estimate_width(const ConeInstance& instance, const Vector& c, long samples,
                             std::uint64_t seed) {
    if (c.size() != instance.dim()) throw InvalidArgument("estimate_width: dimension mismatch");
    const double cn = c.norm();
    if (cn <= 0.0) throw InvalidArgument("estimate_width: c must be nonzero");
    const Vector unit_c = c / cn;

    auto stream = make_stream(seed, "width-mc");
    long accepted = 0;
    double best = 0.0;
    double sum = 0.0, sum_sq = 0.0;
    for (long s = 0; s < samples; ++s) {
        const Vector x = sample_unit_ball(instance.dim(), stream);
        if ((instance.rows() * x).minCoeff() > 0.0) {
            const double value = std::abs(unit_c.dot(x));
            ++accepted;
            best = std::max(best, value);
            sum += value;
            sum_sq += value * value;
        }
    }
    if (accepted == 0)
        throw NumericalFailure("estimate_width: no sample landed in the cone");
    WidthEstimate out;
    out.estimate = best;
    out.accepted = accepted;
    const double mean = sum / static_cast<double>(accepted);
    const double var = std::max(0.0, sum_sq / static_cast<double>(accepted) - mean * mean);
    out.std_error = std::sqrt(var / static_cast<double>(accepted));
    return out;
}

SubsetDirection gaussian_subset_direction(const ConeInstance& instance, const Vector& lambda,
                                          std::uint64_t seed) {
    check_lambda(instance, lambda);
    const int n = instance.dim();
    const double threshold = 1.0 / (4.0 * std::sqrt(M_PI * n));

    auto stream = make_stream(seed, "gaussian-direction");
    for (int attempt = 0; attempt < 64; ++attempt) {
        const Vector g = sample_gaussian(n, stream);
        SubsetDirection out = better_sign_split(instance, lambda, g);
        if (out.c.norm() >= threshold) {
            out.retries = attempt;
            return out;
        }
    }
    SubsetDirection out = derandomized_direction(instance, lambda);
    out.retries = 64;
    return out;
}

SubsetDirection derandomized_direction(const ConeInstance& instance, const Vector& lambda) {
    check_lambda(instance, lambda);
    const int n = instance.dim();
    const int m = instance.row_count();
    const Matrix& a = instance.rows();
    const double penalty_scale = 1.0 / (10.0 * std::sqrt(static_cast<double>(n)));

    // Suffix squared norms: remaining[i][j] = sum_{l > j} a_il^2.
    Matrix remaining(m, n);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = n - 1; j >= 0; --j) {
            remaining(i, j) = acc;
            acc += a(i, j) * a(i, j);
        }
    }

    Vector g = Vector::Zero(n);
    Vector prefix = Vector::Zero(m); // <a_i, g> over fixed coordinates
    double prefix_norm_sq = 0.0;
    for (int j = 0; j < n; ++j) {
        double best_score = -std::numeric_limits<double>::infinity();
        double best_value = 0.0;
        for (double v : kCoordinateGrid) {
            double expectation = 0.0;
            for (int i = 0; i < m; ++i) {
                const double mean_part = prefix[i] + a(i, j) * v;
                expectation += lambda[i] * folded_mean(mean_part, std::sqrt(remaining(i, j)));
            }
            // Jensen upper bound on E||g||_2 over the unfixed coordinates.
            const double norm_bound =
                std::sqrt(prefix_norm_sq + v * v + static_cast<double>(n - j - 1));
            const double score = expectation - penalty_scale * norm_bound;
            if (score > best_score) {
                best_score = score;
                best_value = v;
            }
        }
        g[j] = best_value;
        prefix += a.col(j) * best_value;
        prefix_norm_sq += best_value * best_value;
    }

    const double exact_f =
        (lambda.array() * (a * g).array().abs()).sum() - penalty_scale * g.norm();
    if (!(exact_f > 0.0)) {
        std::ostringstream oss;
        oss << "derandomized_direction: surrogate failed, F(g) = " << exact_f;
        throw NumericalFailure(oss.str());
    }

    SubsetDirection out = better_sign_split(instance, lambda, g);
    out.derandomized = true;
    return out;
}

RescaleOutcome rank1_rescale(const ConeInstance& instance, const Vector& c,
                             const Vector& lambda) {
    check_lambda(instance, lambda);
    if (c.size() != instance.dim()) throw InvalidArgument("rank1_rescale: dimension mismatch");
    const double cn = c.norm();
    if (cn <= 0.0) throw InvalidArgument("rank1_rescale: c must be nonzero");

    const int n = instance.dim();
    const Vector combo = instance.rows().transpose() * lambda;
    const double width_bound = combo.norm() / cn;
    const double limit = 1.0 / (kRank1WidthFactor * std::sqrt(static_cast<double>(n)));
    if (width_bound > limit * (1.0 + 1e-9)) {
        std::ostringstream oss;
        oss << "rank1_rescale: width bound " << width_bound << " exceeds 1/(3 sqrt(n)) = "
            << limit;
        throw PreconditionViolation(oss.str());
    }

    const Vector unit_c = c / cn;
    Matrix rows = instance.rows();
    rows -= 0.5 * (rows * unit_c) * unit_c.transpose();

    RescaleOutcome out{instance.with_rows(std::move(rows), false), Rank1Step{unit_c}, {}};
    out.instance = normalize_rows(out.instance, NormState::identity(n));
    out.report.kind = RescaleReport::Kind::Rank1;
    out.report.direction = unit_c;
    out.report.width_bound = width_bound;
    out.report.det_growth_log = std::log(2.0); // F doubles the thin direction
    return out;
}

RescaleOutcome multirank_rescale(const ConeInstance& instance, const Vector& lambda,
                                 double alpha_cap) {
    check_lambda(instance, lambda);
    if (!(alpha_cap > 0.0)) throw InvalidArgument("multirank_rescale: alpha_cap must be positive");
    const int n = instance.dim();

    const Vector combo = instance.rows().transpose() * lambda;
    const double evidence = combo.norm();
    const double limit = 1.0 / (10.0 * static_cast<double>(n));
    if (evidence > limit * (1.0 + 1e-9)) {
        std::ostringstream oss;
        oss << "multirank_rescale: ||lambda A|| = " << evidence << " exceeds 1/(10n) = " << limit;
        throw PreconditionViolation(oss.str());
    }

    const SecondMoment moment = second_moment(instance, lambda);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(moment.m);
    if (eig.info() != Eigen::Success)
        throw NumericalFailure("multirank_rescale: eigendecomposition failed");
    const Vector& delta_eigs = eig.eigenvalues();
    const double delta_max = delta_eigs.maxCoeff();
    const double alpha = std::min(1.0 / std::max(delta_max, 1e-300), alpha_cap);

    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log1p(alpha * std::max(delta_eigs[i], 0.0));
    if (log_det < 0.5 * alpha - 1e-9 * std::max(1.0, 0.5 * alpha)) {
        std::ostringstream oss;
        oss << "multirank_rescale: det(I + alpha M) bound violated, log det = " << log_det
            << " < alpha/2 = " << 0.5 * alpha;
        throw NumericalFailure(oss.str());
    }

    Vector scaled = (1.0 + alpha * delta_eigs.array()).rsqrt();
    const Matrix map_inv_sqrt =
        eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().transpose();
    Matrix rows = instance.rows() * map_inv_sqrt;

    RescaleOutcome out{instance.with_rows(std::move(rows), false),
                       MultiRankStep{moment.m, alpha},
                       {}};
    out.instance = normalize_rows(out.instance, NormState::identity(n));
    out.report.kind = RescaleReport::Kind::MultiRank;
    out.report.alpha = alpha;
    out.report.det_growth_log = 0.5 * log_det;
    return out;
}

NormUpdateOutcome norm_update(const NormState& norm, const Vector& lambda,
                              const ConeInstance& instance, double alpha_cap) {
    check_lambda(instance, lambda);
    if (!(alpha_cap > 0.0)) throw InvalidArgument("norm_update: alpha_cap must be positive");
    if (!instance.scale_preserving())
        throw InvalidArgument(
            "norm_update: instance rows must be scalings of the original rows");
    const int n = instance.dim();
    const int m = instance.row_count();

    const Vector combo = instance.rows().transpose() * lambda;
    const double evidence = norm.dual_norm(combo);
    const double limit = 1.0 / (10.0 * static_cast<double>(n));
    if (evidence > limit * (1.0 + 1e-9)) {
        std::ostringstream oss;
        oss << "norm_update: ||lambda A||_H^-1 = " << evidence << " exceeds 1/(10n) = " << limit;
        throw PreconditionViolation(oss.str());
    }

    const SecondMoment moment = second_moment(instance, lambda);
    Matrix conjugated = norm.inv_sqrt() * moment.m * norm.inv_sqrt();
    conjugated = 0.5 * (conjugated + conjugated.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(conjugated, Eigen::EigenvaluesOnly);
    const double delta_max = eig.eigenvalues().maxCoeff(); // = ||H^-1 M||_op
    const double alpha = std::min(1.0 / std::max(delta_max, 1e-300), alpha_cap);

    double log_det = 0.0;
    for (int i = 0; i < n; ++i)
        log_det += std::log1p(alpha * std::max(eig.eigenvalues()[i], 0.0));
    if (log_det < 0.5 * alpha - 1e-9 * std::max(1.0, 0.5 * alpha))
        throw NumericalFailure("norm_update: det growth bound violated");

    std::vector<double> coefficients = norm.coefficients();
    coefficients.resize(m, 0.0);
    const Vector& scale = instance.row_scale();
    for (int i = 0; i < m; ++i)
        coefficients[i] += alpha * lambda[i] * scale[i] * scale[i];

    NormUpdateOutcome out{NormState::from_matrix(norm.matrix() + alpha * moment.m,
                                                 std::move(coefficients)),
                          instance, {}};
    out.instance = normalize_rows(instance, out.norm);
    out.report.kind = RescaleReport::Kind::NormUpdate;
    out.report.alpha = alpha;
    out.report.det_growth_log = 0.5 * log_det;
    return out;
}

} // namespace conic
