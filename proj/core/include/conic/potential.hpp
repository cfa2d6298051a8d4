#pragma once

#include "conic/instance.hpp"
#include "conic/norm_state.hpp"
#include "conic/types.hpp"

#include <cstdint>

namespace conic {

/// Evaluation of the softmax potential Phi(x) = sum_i exp(-<A_i, x>) and its
/// derived quantities. phi_log is ln Phi; lambda are the normalized weights;
/// y = sum_i lambda_i A_i is the negated normalized gradient.
struct PotentialEval {
    double phi_log = 0.0;
    Vector lambda;
    Vector y;
    double norm_y_dual = 0.0; // ||y||_{H^-1}
};

/// Weighted second-moment matrix M = sum_i lambda_i A_i A_i'. Equals the
/// normalized Hessian of Phi; trace 1 when rows are dual-unit.
struct SecondMoment {
    Matrix m;
};

/// Log-sum-exp evaluation with max-exponent shift; safe for exponents of any
/// magnitude. Expects rows dual-normalized under `norm`; checks the
/// convex-combination bound ||y||_{H^-1} <= 1 and throws NumericalFailure
/// if it fails beyond tolerance.
PotentialEval evaluate(const ConeInstance& instance, const Vector& x, const NormState& norm);

SecondMoment second_moment(const ConeInstance& instance, const Vector& lambda);

struct GradCheckReport {
    double max_grad_rel_err = 0.0;
    double max_hess_rel_err = 0.0;
    bool pass = false;
};

/// Finite-difference oracle for the analytic gradient -Phi*y and the
/// directional curvature Phi * p'Mp; h must lie in [1e-7, 1e-4]. Ten random
/// directions are drawn for the curvature check.
GradCheckReport grad_check(const ConeInstance& instance, const Vector& x, double h,
                           std::uint64_t seed = 0);

} // namespace conic
