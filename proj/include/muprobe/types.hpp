#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace muprobe {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Input shapes or sizes that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or model data.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A block of a partitioned vector whose phase or norm ratio is undefined.
class DegenerateBlockError : public std::runtime_error {
public:
    DegenerateBlockError(std::size_t block, const std::string& what)
        : std::runtime_error(what), block_(block) {}

    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

/// Something that cannot happen for valid inputs (e.g. a singular resolvent
/// for a stable model).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) noexcept {
    return mix_seed(mix_seed(seed) ^ (a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return derive_seed(derive_seed(seed, a), b);
}

/// Lowest index i with admit(i) whose value(i) is within rel_tol of the
/// largest admitted value, so flat curves peak at their first bin despite
/// rounding noise. -1 when nothing is admitted.
template <class Value, class Admit>
Index tied_argmax(Index count, Value value, Admit admit, double rel_tol = 1e-12) {
    Index arg = -1;
    double top = 0.0;
    for (Index i = 0; i < count; ++i) {
        if (!admit(i)) continue;
        const double v = value(i);
        if (arg < 0 || v > top) {
            arg = i;
            top = v;
        }
    }
    if (arg < 0) return arg;
    const double floor = top - rel_tol * std::abs(top);
    for (Index i = 0; i < arg; ++i)
        if (admit(i) && value(i) >= floor) return i;
    return arg;
}

}  // namespace muprobe
