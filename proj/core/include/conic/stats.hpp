#pragma once

#include <span>
#include <vector>

namespace conic {

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Plain least-squares slope.
double linear_slope(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace conic
