#include "conic/rng.hpp"

#include <cmath>

namespace conic {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
    std::uint64_t state = root ^ fnv1a(label);
    std::uint64_t a = splitmix64(state);
    std::uint64_t b = splitmix64(state);
    return a ^ (b << 1);
}

std::mt19937_64 make_stream(std::uint64_t root, std::string_view label) {
    return std::mt19937_64(derive_seed(root, label));
}

Vector sample_gaussian(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(gen);
    return v;
}

Vector sample_unit_sphere(int n, std::mt19937_64& gen) {
    for (;;) {
        Vector v = sample_gaussian(n, gen);
        const double norm = v.norm();
        if (norm > 1e-12) return v / norm;
    }
}

Vector sample_unit_ball(int n, std::mt19937_64& gen) {
    Vector v = sample_unit_sphere(n, gen);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return v * std::pow(uniform(gen), 1.0 / static_cast<double>(n));
}

Vector sample_simplex(int m, std::mt19937_64& gen) {
    std::exponential_distribution<double> expo(1.0);
    Vector v(m);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        v[i] = expo(gen);
        total += v[i];
    }
    return v / total;
}

} // namespace conic
