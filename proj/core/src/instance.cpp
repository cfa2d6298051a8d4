#include "conic/instance.hpp"

#include "conic/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <utility>

namespace conic {

namespace {

constexpr int kPlantedRetryCap = 10000;

Matrix psd_inverse_sqrt(const Matrix& m, double alpha) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(m.rows(), m.cols()) + alpha * m);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw NumericalFailure("transform factorization lost positive definiteness");
    return eig.eigenvectors() *
           eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

Matrix psd_sqrt(const Matrix& m, double alpha) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(m.rows(), m.cols()) + alpha * m);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw NumericalFailure("transform factorization lost positive definiteness");
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

} // namespace

void TransformLog::push(TransformStep step) {
    if (const auto* r1 = std::get_if<Rank1Step>(&step)) {
        if (std::abs(r1->c.norm() - 1.0) > 1e-12)
            throw InvalidArgument("TransformLog: rank-1 direction must be unit");
    } else {
        const auto& mr = std::get<MultiRankStep>(step);
        const auto& m = mr.m;
        if (m.rows() != m.cols())
            throw InvalidArgument("TransformLog: multi-rank matrix must be square");
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9)
            throw InvalidArgument("TransformLog: multi-rank matrix must be symmetric");
        if (std::abs(m.trace() - 1.0) > 1e-9)
            throw InvalidArgument("TransformLog: multi-rank matrix must have unit trace");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
        const double min_eig = eig.eigenvalues().minCoeff();
        const double max_eig = eig.eigenvalues().maxCoeff();
        if (min_eig < -1e-9)
            throw InvalidArgument("TransformLog: multi-rank matrix must be PSD");
        if (!(mr.alpha > 0.0) || mr.alpha > 1.0 / std::max(max_eig, 1e-300) + 1e-9)
            throw InvalidArgument("TransformLog: alpha outside (0, 1/||M||_op]");
    }
    steps.push_back(std::move(step));
}

ConeInstance::ConeInstance(Matrix rows, std::optional<PlantedWitness> planted)
    : rows_(std::move(rows)), planted_(std::move(planted)) {
    const int m = static_cast<int>(rows_.rows());
    const int n = static_cast<int>(rows_.cols());
    if (m < 1 || n < 1) throw InvalidArgument("instance needs m >= 1 rows and n >= 1 columns");
    if (!rows_.allFinite()) throw InvalidArgument("instance contains a non-finite entry");
    for (int i = 0; i < m; ++i) {
        if (rows_.row(i).norm() == 0.0) {
            std::ostringstream oss;
            oss << "zero row at index " << i;
            throw InvalidArgument(oss.str());
        }
    }
    original_ = rows_;
    scale_ = Vector::Ones(m);
}

ConeInstance ConeInstance::with_rows(Matrix new_rows, bool still_scale_preserving,
                                     Vector new_scale) const {
    if (new_rows.rows() != rows_.rows() || new_rows.cols() != rows_.cols())
        throw InvalidArgument("with_rows: shape mismatch");
    ConeInstance out(*this);
    out.rows_ = std::move(new_rows);
    out.scale_preserving_ = scale_preserving_ && still_scale_preserving;
    if (out.scale_preserving_ && new_scale.size() == rows_.rows())
        out.scale_ = std::move(new_scale);
    else if (!out.scale_preserving_)
        out.scale_ = Vector::Ones(rows_.rows());
    return out;
}

std::pair<ConeInstance, PlantedWitness>
generate_planted(int n, int m, double rho, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("generate_planted: n must be >= 2");
    if (m < 1) throw InvalidArgument("generate_planted: m must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("generate_planted: rho must be in (0,1)");

    auto center_stream = make_stream(seed, "planted-center");
    auto row_stream = make_stream(seed, "planted-rows");
    const Vector z = sample_unit_sphere(n, center_stream);

    Matrix rows(m, n);
    for (int i = 0; i < m; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kPlantedRetryCap; ++attempt) {
            Vector g = sample_unit_sphere(n, row_stream);
            double d = g.dot(z);
            if (d < 0.0) {
                g -= 2.0 * d * z; // reflect across the witness hyperplane
                d = -d;
            }
            if (d >= rho) {
                rows.row(i) = g;
                placed = true;
                break;
            }
        }
        if (!placed) {
            std::ostringstream oss;
            oss << "generate_planted: rejection cap (" << kPlantedRetryCap << ") exceeded at row "
                << i << "; rho=" << rho << " too close to 1 for this family";
            throw GenerationError(oss.str());
        }
    }
    PlantedWitness witness{z, rho};
    return {ConeInstance(std::move(rows), witness), witness};
}

ConeInstance normalize_rows(const ConeInstance& instance, const NormState& norm) {
    if (norm.dim() != instance.dim())
        throw InvalidArgument("normalize_rows: norm dimension mismatch");
    Matrix rows = instance.rows();
    Vector scale = instance.row_scale();
    for (int i = 0; i < rows.rows(); ++i) {
        const double dn = norm.dual_norm(rows.row(i).transpose());
        if (dn < 1e-300) throw NumericalFailure("normalize_rows: dual norm underflow");
        rows.row(i) /= dn;
        scale[i] /= dn;
    }
    return instance.with_rows(std::move(rows), true, std::move(scale));
}

Vector pull_back(const Vector& x, const TransformLog& log) {
    Vector v = x;
    for (auto it = log.steps.rbegin(); it != log.steps.rend(); ++it) {
        if (const auto* r1 = std::get_if<Rank1Step>(&*it)) {
            v -= 0.5 * r1->c.dot(v) * r1->c;
        } else {
            const auto& mr = std::get<MultiRankStep>(*it);
            v = psd_inverse_sqrt(mr.m, mr.alpha) * v;
        }
    }
    return v;
}

Vector apply_forward(const Vector& x, const TransformLog& log) {
    Vector v = x;
    for (const auto& step : log.steps) {
        if (const auto* r1 = std::get_if<Rank1Step>(&step)) {
            v += r1->c.dot(v) * r1->c; // F(c) = 2c, identity orthogonal to c
        } else {
            const auto& mr = std::get<MultiRankStep>(step);
            v = psd_sqrt(mr.m, mr.alpha) * v;
        }
    }
    return v;
}

std::pair<ConeInstance, NormState>
replay_transforms(const ConeInstance& instance, const Certificate& cert) {
    ConeInstance working(instance.original_rows(), instance.planted());
    for (const auto& step : cert.transforms.steps) {
        Matrix rows = working.rows();
        if (const auto* r1 = std::get_if<Rank1Step>(&step)) {
            if (r1->c.size() != working.dim())
                throw InvalidArgument("certificate transform dimension mismatch");
            rows -= 0.5 * (rows * r1->c) * r1->c.transpose();
        } else {
            const auto& mr = std::get<MultiRankStep>(step);
            if (mr.m.rows() != working.dim())
                throw InvalidArgument("certificate transform dimension mismatch");
            rows *= psd_inverse_sqrt(mr.m, mr.alpha);
        }
        working = working.with_rows(std::move(rows), false);
        working = normalize_rows(working, NormState::identity(working.dim()));
    }

    NormState norm = NormState::identity(instance.dim());
    if (!cert.norm_coefficients.empty()) {
        if (static_cast<int>(cert.norm_coefficients.size()) != instance.row_count())
            throw InvalidArgument("certificate norm coefficients dimension mismatch");
        Matrix h = Matrix::Identity(instance.dim(), instance.dim());
        for (int i = 0; i < instance.row_count(); ++i) {
            const Vector row = instance.original_rows().row(i).transpose();
            h += cert.norm_coefficients[i] * row * row.transpose();
        }
        norm = NormState::from_matrix(std::move(h), cert.norm_coefficients);
    }
    working = normalize_rows(working, norm);
    return {std::move(working), std::move(norm)};
}

VerificationReport verify_certificate(const ConeInstance& instance, const Certificate& cert) {
    VerificationReport report;
    if (const auto* feasible = std::get_if<FeasiblePoint>(&cert.value)) {
        if (feasible->x.size() != instance.dim())
            throw InvalidArgument("verify_certificate: point dimension mismatch");
        report.feasibility_margin = (instance.original_rows() * feasible->x).minCoeff();
        report.pass = report.feasibility_margin > 0.0;
        report.detail = report.pass ? "strictly feasible in original coordinates"
                                    : "margin not strictly positive";
        return report;
    }
    if (const auto* evidence = std::get_if<DualEvidence>(&cert.value)) {
        if (evidence->lambda.size() != instance.row_count())
            throw InvalidArgument("verify_certificate: lambda dimension mismatch");
        auto [working, norm] = replay_transforms(instance, cert);
        report.lambda_l1 = evidence->lambda.cwiseAbs().sum();
        const bool nonneg = evidence->lambda.minCoeff() >= -1e-15;
        const Vector combo = working.rows().transpose() * evidence->lambda;
        report.evidence_norm = norm.dual_norm(combo);
        const bool l1_ok = nonneg && std::abs(report.lambda_l1 - 1.0) <= 1e-12;
        const bool norm_ok =
            report.evidence_norm <= evidence->delta_achieved * (1.0 + 1e-9) + 1e-300;
        report.pass = l1_ok && norm_ok;
        std::ostringstream oss;
        oss << "recomputed ||lambda A|| = " << report.evidence_norm << " vs claimed "
            << evidence->delta_achieved;
        if (!l1_ok) oss << "; ||lambda||_1 = " << report.lambda_l1 << " invalid";
        report.detail = oss.str();
        return report;
    }
    report.pass = true;
    report.detail = "budget-exhausted certificate carries no verifiable claim";
    return report;
}

} // namespace conic
