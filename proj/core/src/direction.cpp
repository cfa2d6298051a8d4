#include "conic/direction.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace conic {

int eigen_split_depth(int n) {
    return static_cast<int>(std::ceil(10.0 * padded_log2(n)));
}

namespace {

void check_identity(const char* name, double lhs, double rhs) {
    const double tol = 1e-8 * std::max(std::abs(lhs), std::abs(rhs)) + 1e-12;
    if (std::abs(lhs - rhs) > tol) {
        std::ostringstream oss;
        oss << "choose_direction: transfer identity " << name << " broken: " << lhs
            << " vs " << rhs;
        throw NumericalFailure(oss.str());
    }
}

} // namespace

EigenComponentResult approx_eigen_component(const Vector& z, const Matrix& n_matrix, int depth,
                                            double c) {
    const auto n = z.size();
    if (n_matrix.rows() != n || n_matrix.cols() != n)
        throw InvalidArgument("approx_eigen_component: shape mismatch");
    if (std::abs(z.norm() - 1.0) > 1e-9)
        throw InvalidArgument("approx_eigen_component: z must be a unit vector");
    if ((n_matrix - n_matrix.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidArgument("approx_eigen_component: N must be symmetric");
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(n_matrix, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-9 || eig.eigenvalues().maxCoeff() > 1.0 + 1e-9)
            throw InvalidArgument("approx_eigen_component: N must be PSD with ||N||_op <= 1");
    }
    if (depth < 1) throw InvalidArgument("approx_eigen_component: depth must be >= 1");

    // Work with the halved matrix so no eigenvalue exceeds 1/2.
    const Matrix n_half = 0.5 * n_matrix;
    Matrix power = Matrix::Identity(n, n) - n_half; // becomes (I - N/2)^{2^k}
    const double k_double = static_cast<double>(depth);

    std::vector<EigenSplitFailure::LevelRecord> table;
    table.reserve(depth);
    EigenComponentResult result;
    for (int k = 1; k <= depth; ++k) {
        power = (power * power).eval();
        const Vector z_k = power * z;
        const Vector nz_k = n_half * z_k;
        const double inner_zzk = z.dot(z_k);
        const double inner_znzk = z.dot(nz_k);
        const double norm_nzk = nz_k.norm();
        table.push_back({k, inner_zzk, inner_znzk, norm_nzk});

        // Case 1 needs genuine curvature along z_k; the degenerate norm-0
        // situation belongs to Case 2.
        if (inner_zzk >= c / k_double && norm_nzk > 0.0 &&
            inner_znzk >= c * norm_nzk / (k_double * k_double)) {
            result.k = k;
            result.z_k = z_k;
            result.case_tag = EigenComponentResult::Case::One;
            result.inner_zzk = inner_zzk;
            result.inner_znzk = inner_znzk;
            result.norm_nzk = norm_nzk;
            return result;
        }
        if (k == depth && inner_zzk >= c / k_double &&
            norm_nzk <= k_double / std::pow(2.0, k_double)) {
            result.k = k;
            result.z_k = z_k;
            result.case_tag = EigenComponentResult::Case::Two;
            result.inner_zzk = inner_zzk;
            result.inner_znzk = inner_znzk;
            result.norm_nzk = norm_nzk;
            return result;
        }
    }

    std::ostringstream oss;
    oss << "approx_eigen_component: neither case holds for C=" << c << ", K=" << depth << "\n";
    oss << "  k  <z,z_k>        <z,Nz_k>       ||Nz_k||\n";
    for (const auto& row : table) {
        oss << "  " << row.k << "  " << row.inner_zzk << "  " << row.inner_znzk << "  "
            << row.norm_nzk << "\n";
    }
    throw EigenSplitFailure(oss.str(), std::move(table));
}

DirectionChoice choose_direction(const Vector& y, const SecondMoment& moment,
                                 const NormState& norm, int depth) {
    const double g = norm.dual_norm(y);
    if (!(g > 0.0)) throw InvalidArgument("choose_direction: y must be nonzero");

    Vector z;
    Matrix n_matrix;
    if (norm.is_identity()) {
        z = y / g;
        n_matrix = moment.m;
    } else {
        z = norm.inv_sqrt() * y / g;
        n_matrix = norm.inv_sqrt() * moment.m * norm.inv_sqrt();
        n_matrix = 0.5 * (n_matrix + n_matrix.transpose()).eval();
    }

    DirectionChoice choice;
    choice.component = approx_eigen_component(z, n_matrix, depth);
    choice.p = norm.is_identity() ? choice.component.z_k
                                  : Vector(norm.inv_sqrt() * choice.component.z_k);

    const Vector mp = moment.m * choice.p;
    check_identity("||p||_H", norm.norm(choice.p), choice.component.z_k.norm());
    check_identity("||Mp||_H^-1", norm.dual_norm(mp), (n_matrix * choice.component.z_k).norm());
    check_identity("<y,p>/||y||", y.dot(choice.p) / g, choice.component.inner_zzk);
    check_identity("<y,Mp>_H^-1/||y||", y.dot(norm.inverse() * mp) / g,
                   2.0 * choice.component.inner_znzk);
    return choice;
}

double choose_step(const Vector& y, const Vector& p, const SecondMoment& moment,
                   const NormState& norm, double a) {
    const double g = norm.dual_norm(y);
    const double mp_norm = norm.dual_norm(moment.m * p);
    const double log_n = padded_log2(static_cast<int>(y.size()));
    const double cap_branch = 1.0 / (2.0 * std::pow(log_n, a));
    double eps = cap_branch;
    if (mp_norm > 0.0)
        eps = std::min(eps, g / (4.0 * std::pow(log_n, 2.0 * a) * mp_norm));
    eps = std::min(eps, 0.5);
    if (!(eps > 0.0)) throw NumericalFailure("choose_step: nonpositive step");
    return eps;
}

} // namespace conic
