#pragma once

#include "conic/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace conic {

/// Derives an independent stream seed from a root seed and a label, so that
/// enabling or disabling one consumer of randomness never shifts the values
/// another consumer sees.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// mt19937_64 seeded from (root, label) via derive_seed.
std::mt19937_64 make_stream(std::uint64_t root, std::string_view label);

Vector sample_gaussian(int n, std::mt19937_64& gen);
Vector sample_unit_sphere(int n, std::mt19937_64& gen);
Vector sample_unit_ball(int n, std::mt19937_64& gen);

/// Uniform point of the probability simplex (normalized exponentials).
Vector sample_simplex(int m, std::mt19937_64& gen);

} // namespace conic
