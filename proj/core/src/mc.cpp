#include "conic/mc.hpp"

#include "conic/rng.hpp"

#include <cmath>

namespace conic {

McEstimate mc_volume_fraction(const ConeInstance& instance, const NormState& norm,
                              long samples, std::uint64_t seed) {
    const int n = instance.dim();
    if (n > 6) throw InvalidArgument("mc_volume_fraction: oracle scoped to n <= 6");
    if (samples < 1) throw InvalidArgument("mc_volume_fraction: need at least one sample");
    if (norm.dim() != n) throw InvalidArgument("mc_volume_fraction: norm dimension mismatch");

    auto stream = make_stream(seed, "mc-volume");
    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        Vector x = sample_unit_ball(n, stream);
        if (!norm.is_identity()) x = norm.inv_sqrt() * x; // uniform in B_H
        if ((instance.rows() * x).minCoeff() > 0.0) ++hits;
    }
    McEstimate out;
    out.samples = samples;
    out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

} // namespace conic
