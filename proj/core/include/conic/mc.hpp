#pragma once

#include "conic/instance.hpp"
#include "conic/norm_state.hpp"
#include "conic/types.hpp"

#include <cstdint>

namespace conic {

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

/// Fraction of the norm ball B_H that lies in the cone, mu(H) =
/// vol(B_H cap P) / vol(B_H), by uniform sampling (Gaussian direction and
/// radius transformed through H^{-1/2}). Oracle for low dimensions (n <= 6).
McEstimate mc_volume_fraction(const ConeInstance& instance, const NormState& norm,
                              long samples, std::uint64_t seed);

} // namespace conic
