#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace conic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: dimension mismatches, inconsistent configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed instance / certificate document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Planted-instance generation gave up (rejection cap exceeded).
class GenerationError : public Error {
public:
    using Error::Error;
};

/// A rescale was requested whose entry condition does not hold.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// Arithmetic produced values that contradict a guaranteed inequality;
/// indicates numerical corruption rather than bad input.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

enum class PhaseMode {
    ClassicalPerceptron,
    SmoothPerceptron,
    MwuStandard,
    MwuModified,
};

enum class RescaleMode {
    Rank1,
    MultiRank,
    NormUpdate,
};

std::string to_string(PhaseMode mode);
std::string to_string(RescaleMode mode);
PhaseMode phase_mode_from_string(const std::string& name);
RescaleMode rescale_mode_from_string(const std::string& name);

/// log2(n + 2); the +2 keeps the value above 1 for every valid dimension.
inline double padded_log2(int n) {
    return std::log2(static_cast<double>(n) + 2.0);
}

/// Evidence threshold the driver hands to a phase: 1/(12 n sqrt(pi)) when the
/// consumer is the rank-1 rescale, 1/(10 n) for the multi-rank and norm-update
/// rescales.
double evidence_threshold(RescaleMode mode, int n);

inline constexpr double kRank1WidthFactor = 3.0;      // width bound 1/(3 sqrt(n))
inline constexpr double kDefaultAlphaCap = 8.0;

} // namespace conic
