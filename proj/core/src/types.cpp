#include "conic/types.hpp"

#include <cmath>

namespace conic {

std::string to_string(PhaseMode mode) {
    switch (mode) {
    case PhaseMode::ClassicalPerceptron: return "classical";
    case PhaseMode::SmoothPerceptron: return "smooth";
    case PhaseMode::MwuStandard: return "mwu";
    case PhaseMode::MwuModified: return "mwu-fast";
    }
    return "?";
}

std::string to_string(RescaleMode mode) {
    switch (mode) {
    case RescaleMode::Rank1: return "rank1";
    case RescaleMode::MultiRank: return "multirank";
    case RescaleMode::NormUpdate: return "norm";
    }
    return "?";
}

PhaseMode phase_mode_from_string(const std::string& name) {
    if (name == "classical") return PhaseMode::ClassicalPerceptron;
    if (name == "smooth") return PhaseMode::SmoothPerceptron;
    if (name == "mwu") return PhaseMode::MwuStandard;
    if (name == "mwu-fast") return PhaseMode::MwuModified;
    throw InvalidArgument("unknown phase mode: " + name);
}

RescaleMode rescale_mode_from_string(const std::string& name) {
    if (name == "rank1") return RescaleMode::Rank1;
    if (name == "multirank") return RescaleMode::MultiRank;
    if (name == "norm") return RescaleMode::NormUpdate;
    throw InvalidArgument("unknown rescale mode: " + name);
}

double evidence_threshold(RescaleMode mode, int n) {
    if (n < 1) throw InvalidArgument("evidence_threshold: n must be positive");
    const double nd = static_cast<double>(n);
    if (mode == RescaleMode::Rank1) return 1.0 / (12.0 * nd * std::sqrt(M_PI));
    return 1.0 / (10.0 * nd);
}

} // namespace conic
