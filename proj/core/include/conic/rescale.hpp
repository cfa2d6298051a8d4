#pragma once

#include "conic/instance.hpp"
#include "conic/norm_state.hpp"
#include "conic/types.hpp"

#include <cstdint>
#include <vector>

namespace conic {

struct RescaleReport {
    enum class Kind { Rank1, MultiRank, NormUpdate } kind = Kind::Rank1;
    Vector direction;           // Rank1: the unit direction c
    double alpha = 0.0;         // MultiRank / NormUpdate
    double det_growth_log = 0.0;// log det of the applied map (>= alpha/4 for multi-rank)
    double width_bound = 0.0;   // Rank1: ||lambda A|| / ||c||
    int retries = 0;            // direction draws consumed (rank-1 path)
    bool derandomized = false;
    int phase = 0;              // solve phase that triggered the rescale
};

struct WidthEstimate {
    double estimate = 0.0;
    long accepted = 0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of width(P, c) = max_{x in P cap B} |<c,x>| / ||c||
/// by rejection sampling in the unit ball. Test oracle, not on the solve
/// path. Throws NumericalFailure when no sample lands in the cone.
WidthEstimate estimate_width(const ConeInstance& instance, const Vector& c, long samples,
                             std::uint64_t seed);

struct SubsetDirection {
    Vector c;
    std::vector<int> subset; // row indices of the chosen sign set
    Vector g;                // the hyperplane normal used
    int retries = 0;
    bool derandomized = false;
};

/// Thin-direction extraction from evidence lambda using a random Gaussian
/// hyperplane: J = {i : <A_i,g> >= 0}, c = sum_{i in J} lambda_i A_i, taking
/// the better of J and its complement. Retries with fresh g until
/// ||c|| >= 1/(4 sqrt(pi n)); after 64 failures falls back to the
/// derandomized construction. Requires Euclidean-unit rows.
SubsetDirection gaussian_subset_direction(const ConeInstance& instance, const Vector& lambda,
                                          std::uint64_t seed);

/// Deterministic thin direction by the method of conditional expectations on
/// F(g) = sum_i lambda_i |<A_i,g>| - ||g||/(10 sqrt(n)): coordinates of g are
/// fixed left to right, each chosen from a small candidate grid to maximize a
/// closed-form surrogate of E[F | prefix]. The returned g satisfies F(g) > 0,
/// hence sum_i lambda_i |<A_i, g/||g||>| >= 1/(10 sqrt(n)) and the chosen sign
/// set gives ||c|| >= 1/(20 sqrt(n)). Throws NumericalFailure if the exact
/// final F(g) is not positive (must not happen).
SubsetDirection derandomized_direction(const ConeInstance& instance, const Vector& lambda);

struct RescaleOutcome {
    ConeInstance instance;
    TransformStep step;
    RescaleReport report;
};

/// Stretch-by-2 along a thin direction: rows become A (I - c c'/2), then are
/// Euclidean-renormalized. Requires width bound ||lambda A||_2 / ||c||_2 <=
/// 1/(3 sqrt(n)) (PreconditionViolation otherwise, carrying the measured
/// value in the message).
RescaleOutcome rank1_rescale(const ConeInstance& instance, const Vector& c,
                             const Vector& lambda);

/// Multi-rank rescale: rows become A (I + alpha M)^{-1/2} with
/// M = sum_i lambda_i A_i A_i', alpha = min(1/||M||_op, alpha_cap), then are
/// renormalized. Requires ||lambda A||_2 <= 1/(10 n). Checks
/// det(I + alpha M) >= e^{alpha/2} and reports half its log as the map's
/// determinant growth.
RescaleOutcome multirank_rescale(const ConeInstance& instance, const Vector& lambda,
                                 double alpha_cap = kDefaultAlphaCap);

struct NormUpdateOutcome {
    NormState norm;
    ConeInstance instance; // re-normalized under the new dual norm
    RescaleReport report;
};

/// Norm-view rescale: H <- H + alpha M with alpha = min(1/||H^-1 M||_op,
/// alpha_cap); the cone is left untouched and the coefficient log is extended
/// so that H = I + sum_i h_i a_i a_i' over original rows. Requires
/// ||lambda A||_{H^-1} <= 1/(10 n).
NormUpdateOutcome norm_update(const NormState& norm, const Vector& lambda,
                              const ConeInstance& instance, double alpha_cap = kDefaultAlphaCap);

} // namespace conic
