#pragma once

#include "conic/norm_state.hpp"
#include "conic/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace conic {

/// One recorded rank-1 cone rescale: rows were multiplied by (I - c c'/2).
struct Rank1Step {
    Vector c; // unit direction
};

/// One recorded multi-rank rescale: the cone was mapped by (I + alpha M)^{1/2}.
struct MultiRankStep {
    Matrix m;
    double alpha = 0.0;
};

using TransformStep = std::variant<Rank1Step, MultiRankStep>;

/// Ordered composition of the rescales applied to an instance. Solutions in
/// final working coordinates are pulled back through the inverses in reverse
/// order.
struct TransformLog {
    std::vector<TransformStep> steps;

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }
    void push(TransformStep step);
};

struct PlantedWitness {
    Vector center; // unit vector
    double rho = 0.0;
};

/// Problem instance: the open cone {x : Ax > 0}.
///
/// `rows()` are the current working coordinates; `original_rows()` never
/// change after construction and are what certificates are verified against.
/// All mutating operations return new instances.
class ConeInstance {
public:
    /// Rows of the input matrix A, one constraint per row. Throws ParseError
    /// on zero rows, non-finite entries, or empty dimensions.
    explicit ConeInstance(Matrix rows, std::optional<PlantedWitness> planted = std::nullopt);

    int dim() const { return static_cast<int>(rows_.cols()); }
    int row_count() const { return static_cast<int>(rows_.rows()); }

    const Matrix& rows() const { return rows_; }
    const Matrix& original_rows() const { return original_; }
    const std::optional<PlantedWitness>& planted() const { return planted_; }

    /// True while working rows are positive scalings of the original rows
    /// (no linear transform applied); required by the norm-update bookkeeping.
    bool scale_preserving() const { return scale_preserving_; }

    /// rows()[i] == row_scale()[i] * original_rows()[i] while scale_preserving().
    const Vector& row_scale() const { return scale_; }

    /// Replacement used by the rescale operations; keeps original rows.
    ConeInstance with_rows(Matrix new_rows, bool still_scale_preserving,
                           Vector new_scale = Vector()) const;

private:
    Matrix rows_;
    Matrix original_;
    Vector scale_;
    bool scale_preserving_ = true;
    std::optional<PlantedWitness> planted_;
};

/// Planted-feasible instance: unit rows with <A_i, z*> >= rho for a random
/// unit center z*. Deterministic in the seed. Throws GenerationError if the
/// per-row rejection cap (10000) is exceeded, which signals rho too close
/// to 1 for the requested row count.
std::pair<ConeInstance, PlantedWitness>
generate_planted(int n, int m, double rho, std::uint64_t seed);

/// Scales every row to unit dual norm ||A_i||_{H^-1} = 1. Feasible set is
/// unchanged. Throws NumericalFailure if a row's dual norm underflows.
ConeInstance normalize_rows(const ConeInstance& instance, const NormState& norm);

/// Maps a point in final working coordinates back to original coordinates:
/// inverse transforms applied in reverse order. Rank1(c) applies (I - cc'/2),
/// MultiRank(M, alpha) applies (I + alpha M)^{-1/2}.
Vector pull_back(const Vector& x, const TransformLog& log);

/// Forward composition (test oracle for pull_back).
Vector apply_forward(const Vector& x, const TransformLog& log);

struct FeasiblePoint {
    Vector x; // original coordinates
};

struct DualEvidence {
    Vector lambda;
    double delta_achieved = 0.0;
};

struct BudgetExhausted {
    std::string summary;
};

struct Certificate {
    std::variant<FeasiblePoint, DualEvidence, BudgetExhausted> value;
    TransformLog transforms;               // transforms behind the claim
    std::vector<double> norm_coefficients; // nonempty for norm-view evidence

    bool is_feasible() const { return std::holds_alternative<FeasiblePoint>(value); }
    bool is_dual_evidence() const { return std::holds_alternative<DualEvidence>(value); }
    bool is_budget_exhausted() const { return std::holds_alternative<BudgetExhausted>(value); }
};

struct VerificationReport {
    bool pass = false;
    double feasibility_margin = 0.0; // min_i <original A_i, x> for Feasible
    double lambda_l1 = 0.0;          // recomputed for DualEvidence
    double evidence_norm = 0.0;      // recomputed ||lambda A|| in working coords
    std::string detail;
};

/// Checks a certificate against the instance it was issued for.
/// Feasible: strict margin over the original rows. DualEvidence: replays the
/// certificate's transforms from the original rows, rebuilds the norm from the
/// coefficient log, and recomputes ||lambda||_1 and ||lambda A||_{H^-1};
/// passes iff the norm is within 1e-9 relative of the claimed value (or below)
/// and ||lambda||_1 == 1 within 1e-12.
VerificationReport verify_certificate(const ConeInstance& instance, const Certificate& cert);

/// Working instance + norm reconstructed from a certificate's transform log
/// and coefficient log (the state verify_certificate measures evidence in).
std::pair<ConeInstance, NormState>
replay_transforms(const ConeInstance& instance, const Certificate& cert);

} // namespace conic
