#include "conic/norm_state.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace conic {

NormState NormState::identity(int n) {
    if (n < 1) throw InvalidArgument("NormState: dimension must be positive");
    NormState s;
    s.h_ = Matrix::Identity(n, n);
    s.inv_ = s.h_;
    s.sqrt_ = s.h_;
    s.inv_sqrt_ = s.h_;
    s.min_eig_ = 1.0;
    s.is_identity_ = true;
    return s;
}

NormState NormState::from_matrix(Matrix h, std::vector<double> coefficients) {
    if (h.rows() != h.cols() || h.rows() < 1)
        throw InvalidArgument("NormState: matrix must be square");
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw InvalidArgument("NormState: matrix not symmetric");
    h = 0.5 * (h + h.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success)
        throw NumericalFailure("NormState: eigendecomposition failed");
    const Vector& vals = eig.eigenvalues();
    if (vals.minCoeff() <= 0.0)
        throw InvalidArgument("NormState: matrix not positive definite");

    NormState s;
    s.h_ = std::move(h);
    const Matrix& v = eig.eigenvectors();
    s.inv_ = v * vals.cwiseInverse().asDiagonal() * v.transpose();
    s.sqrt_ = v * vals.cwiseSqrt().asDiagonal() * v.transpose();
    s.inv_sqrt_ = v * vals.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    s.min_eig_ = vals.minCoeff();
    s.is_identity_ = false;
    s.coefficients_ = std::move(coefficients);
    return s;
}

double NormState::norm(const Vector& x) const {
    if (is_identity_) return x.norm();
    return std::sqrt(std::max(0.0, x.dot(h_ * x)));
}

double NormState::dual_norm(const Vector& v) const {
    if (is_identity_) return v.norm();
    return std::sqrt(std::max(0.0, v.dot(inv_ * v)));
}

} // namespace conic
