#pragma once

#include "muprobe/types.hpp"

namespace muprobe {

/// N frequency bins of n-channel complex vectors; row m is bin m at
/// frequency 2 pi m / N.
struct SpectralSignal {
    ComplexMatrix bins;

    SpectralSignal() = default;
    explicit SpectralSignal(ComplexMatrix b) : bins(std::move(b)) {}
    static SpectralSignal zeros(Index N, Index n) { return SpectralSignal(ComplexMatrix::Zero(N, n)); }

    Index size() const noexcept { return bins.rows(); }
    Index channels() const noexcept { return bins.cols(); }
    ComplexVector bin(Index m) const { return bins.row(m).transpose(); }
    void set_bin(Index m, const ComplexVector& v) { bins.row(m) = v.transpose(); }

    /// Sum over bins of squared vector norms.
    double energy() const { return bins.squaredNorm(); }
};

/// N time samples of n-channel vectors. Row k holds sample t = k + 1, so the
/// transforms below use the t = 1..N indexing directly.
struct TimeSignal {
    ComplexMatrix samples;

    TimeSignal() = default;
    explicit TimeSignal(ComplexMatrix s) : samples(std::move(s)) {}
    static TimeSignal from_real(const RealMatrix& r) { return TimeSignal(r.cast<Complex>()); }

    Index size() const noexcept { return samples.rows(); }
    Index channels() const noexcept { return samples.cols(); }
    RealMatrix real() const { return samples.real(); }
    double max_imag() const { return samples.size() ? samples.imag().cwiseAbs().maxCoeff() : 0.0; }
};

// The transforms below use FFTs internally; `reference` holds the direct
// O(N^2) summations they are checked against.

/// x[t] = (1/N) sum_m X[m] e^{ i 2 pi m t / N},        t = 1..N
TimeSignal idft_standard(const SpectralSignal& X);
/// X[m] = sum_t x[t] e^{-i 2 pi m t / N}
SpectralSignal dft_standard(const TimeSignal& x);
/// z[t] = (1/N) sum_m Z[m] e^{ i 2 pi m (1 - t) / N},  t = 1..N
TimeSignal idft_time_reversed(const SpectralSignal& Z);
/// R[m] = sum_t r[t] e^{ i 2 pi m (t - 1) / N}
SpectralSignal dft_time_reversed(const TimeSignal& r);

/// X'[m] = (X[m] + conj(X[(N - m) mod N])) / 2.
SpectralSignal enforce_conjugate_symmetry(const SpectralSignal& X);

/// max_m |X[m] - conj(X[(N - m) mod N])|, elementwise.
double conjugate_symmetry_error(const SpectralSignal& X);

namespace reference {

TimeSignal idft_standard(const SpectralSignal& X);
SpectralSignal dft_standard(const TimeSignal& x);
TimeSignal idft_time_reversed(const SpectralSignal& Z);
SpectralSignal dft_time_reversed(const TimeSignal& r);

}  // namespace reference

}  // namespace muprobe
