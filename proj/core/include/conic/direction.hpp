#pragma once

#include "conic/norm_state.hpp"
#include "conic/potential.hpp"
#include "conic/types.hpp"

#include <string>
#include <vector>

namespace conic {

/// Constant C of the eigenspace-splitting argument; the worst bucket of the
/// proof gives 1/(2 e^2).
inline const double kEigenSplitC = 0.5 / (2.718281828459045 * 2.718281828459045);

/// Squaring depth K = ceil(10 log2(n+2)).
int eigen_split_depth(int n);

/// Result of projecting z onto an approximate eigenspace of N via repeated
/// squaring of (I - N/2). All reported quantities refer to the internally
/// halved matrix.
struct EigenComponentResult {
    int k = 0;
    Vector z_k;
    enum class Case { One, Two } case_tag = Case::One;
    double inner_zzk = 0.0;  // <z, z_k>
    double inner_znzk = 0.0; // <z, (N/2) z_k>
    double norm_nzk = 0.0;   // ||(N/2) z_k||
};

/// Thrown when neither case of the eigenspace split holds at any level; this
/// falsifies the configured constant C and carries the full level table.
class EigenSplitFailure : public NumericalFailure {
public:
    struct LevelRecord {
        int k;
        double inner_zzk, inner_znzk, norm_nzk;
    };

    EigenSplitFailure(std::string message, std::vector<LevelRecord> table)
        : NumericalFailure(std::move(message)), table_(std::move(table)) {}

    const std::vector<LevelRecord>& table() const { return table_; }

private:
    std::vector<LevelRecord> table_;
};

/// Computes z_k = (I - N/2)^{2^k} z by K successive matrix squarings and
/// returns the smallest k whose quantities satisfy Case 1
/// (<z,z_k> >= C/K and <z,Nz_k> >= C ||Nz_k|| / K^2), else Case 2 at k = K
/// (<z,z_K> >= C/K and ||Nz_K|| <= K/2^K). Throws EigenSplitFailure if
/// neither holds anywhere.
///
/// Preconditions: ||z|| = 1 (1e-9), N symmetric PSD with operator norm <= 1.
EigenComponentResult approx_eigen_component(const Vector& z, const Matrix& n_matrix, int depth,
                                            double c = kEigenSplitC);

struct DirectionChoice {
    Vector p;
    EigenComponentResult component;
};

/// Update direction for the modified gradient step: maps the problem into the
/// H^{-1/2} frame, splits off an approximate eigencomponent of the Hessian,
/// and maps back: p = H^{-1/2} z_k.
///
/// The four transfer identities ||p||_H = ||z_k||, ||Mp||_{H^-1} = ||N z_k||,
/// <y,p>/||y||_{H^-1} = <z,z_k> and <y,Mp>_{H^-1}/||y||_{H^-1} = <z,N z_k>
/// are asserted within 1e-8 relative (NumericalFailure otherwise).
DirectionChoice choose_direction(const Vector& y, const SecondMoment& moment,
                                 const NormState& norm, int depth);

/// Step size min{ ||y||_{H^-1} / (4 (log n)^{2a} ||Mp||_{H^-1}),
///                1 / (2 (log n)^a) } capped at 1/2; log is padded_log2.
double choose_step(const Vector& y, const Vector& p, const SecondMoment& moment,
                   const NormState& norm, double a);

} // namespace conic
