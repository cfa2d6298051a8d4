#include "conic/potential.hpp"

#include "conic/rng.hpp"

#include <cmath>
#include <sstream>

namespace conic {

PotentialEval evaluate(const ConeInstance& instance, const Vector& x, const NormState& norm) {
    if (x.size() != instance.dim())
        throw InvalidArgument("evaluate: point dimension mismatch");
    if (!x.allFinite())
        throw InvalidArgument("evaluate: non-finite point");

    PotentialEval out;
    const Vector exponents = -(instance.rows() * x); // -<A_i, x>
    const double shift = exponents.maxCoeff();
    const Vector scaled = (exponents.array() - shift).exp();
    const double total = scaled.sum();
    out.lambda = scaled / total;
    out.phi_log = shift + std::log(total);
    out.y = instance.rows().transpose() * out.lambda;
    out.norm_y_dual = norm.dual_norm(out.y);
    // Convex combination of dual-unit rows; anything above 1 means the rows
    // were not normalized or the arithmetic is corrupt.
    if (out.norm_y_dual > 1.0 + 1e-9) {
        std::ostringstream oss;
        oss << "evaluate: ||y||_dual = " << out.norm_y_dual << " exceeds 1";
        throw NumericalFailure(oss.str());
    }
    return out;
}

SecondMoment second_moment(const ConeInstance& instance, const Vector& lambda) {
    if (lambda.size() != instance.row_count())
        throw InvalidArgument("second_moment: lambda dimension mismatch");
    const Matrix& a = instance.rows();
    Matrix m = a.transpose() * lambda.asDiagonal() * a;
    m = 0.5 * (m + m.transpose()).eval(); // enforce exact symmetry
    return SecondMoment{std::move(m)};
}

namespace {

double phi_direct(const ConeInstance& instance, const Vector& x) {
    return (-(instance.rows() * x)).array().exp().sum();
}

} // namespace

GradCheckReport grad_check(const ConeInstance& instance, const Vector& x, double h,
                           std::uint64_t seed) {
    if (!(h >= 1e-7 && h <= 1e-4))
        throw InvalidArgument("grad_check: h must lie in [1e-7, 1e-4]");
    const int n = instance.dim();
    const NormState id = NormState::identity(n);
    const PotentialEval eval = evaluate(instance, x, id);
    const double phi = std::exp(eval.phi_log);

    // Errors are measured relative to the natural scale Phi: both the
    // gradient (-Phi y, ||y|| <= 1) and the curvature (Phi p'Mp, p'Mp <= 1)
    // are bounded by it, and near-zero components would otherwise drown in
    // finite-difference noise.
    GradCheckReport report;
    for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e[j] = h;
        const double fd = (phi_direct(instance, x + e) - phi_direct(instance, x - e)) / (2.0 * h);
        const double analytic = -phi * eval.y[j];
        const double scale = std::max({std::abs(analytic), std::abs(fd), phi});
        report.max_grad_rel_err = std::max(report.max_grad_rel_err, std::abs(fd - analytic) / scale);
    }

    const SecondMoment moment = second_moment(instance, eval.lambda);
    auto stream = make_stream(seed, "grad-check-directions");
    for (int trial = 0; trial < 10; ++trial) {
        const Vector p = sample_unit_sphere(n, stream);
        const double fd2 = (phi_direct(instance, x + h * p) - 2.0 * phi +
                            phi_direct(instance, x - h * p)) / (h * h);
        const double analytic = phi * p.dot(moment.m * p);
        const double scale = std::max({std::abs(analytic), std::abs(fd2), phi});
        report.max_hess_rel_err = std::max(report.max_hess_rel_err, std::abs(fd2 - analytic) / scale);
    }

    report.pass = report.max_grad_rel_err < 1e-6 && report.max_hess_rel_err < 1e-4;
    return report;
}

} // namespace conic
