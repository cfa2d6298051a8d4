#pragma once

#include "conic/types.hpp"

#include <vector>

namespace conic {

/// Symmetric positive definite matrix H defining the working norm
/// ||x||_H = sqrt(x'Hx) and its dual ||v||_{H^-1} = sqrt(v'H^-1 v).
///
/// The square-root factors are eigendecomposed once at construction and then
/// shared; a NormState is immutable. Norm updates build a fresh state via
/// norm_update() in rescale.hpp, which also extends the coefficient log:
/// throughout a norm-view solve H keeps the form I + sum_i h_i a_i a_i'
/// over the original instance rows, and `coefficients()` exposes the h_i.
class NormState {
public:
    static NormState identity(int n);

    /// Validates symmetry and positive definiteness.
    static NormState from_matrix(Matrix h, std::vector<double> coefficients = {});

    int dim() const { return static_cast<int>(h_.rows()); }
    bool is_identity() const { return is_identity_; }

    const Matrix& matrix() const { return h_; }
    const Matrix& inverse() const { return inv_; }
    const Matrix& sqrt() const { return sqrt_; }
    const Matrix& inv_sqrt() const { return inv_sqrt_; }

    double norm(const Vector& x) const;
    double dual_norm(const Vector& v) const;

    double min_eigenvalue() const { return min_eig_; }

    /// Coefficient log h_i over original rows; empty until the first update.
    const std::vector<double>& coefficients() const { return coefficients_; }

private:
    NormState() = default;

    Matrix h_, inv_, sqrt_, inv_sqrt_;
    double min_eig_ = 0.0;
    bool is_identity_ = false;
    std::vector<double> coefficients_;
};

} // namespace conic
