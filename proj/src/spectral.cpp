#include "muprobe/spectral.hpp"

#include <vector>

#include <unsupported/Eigen/FFT>

namespace muprobe {

namespace {

// roots[k] = e^{i 2 pi k / N}; indexing by (m * t) mod N keeps the phase
// exact for large products.
std::vector<Complex> unit_roots(Index N) {
    std::vector<Complex> roots(static_cast<std::size_t>(N));
    for (Index k = 0; k < N; ++k) roots[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(N));
    return roots;
}

Index wrap(long long k, Index N) {
    const long long r = k % static_cast<long long>(N);
    return static_cast<Index>(r < 0 ? r + N : r);
}

// out[j] = scale * sum_k in[k] * roots[(sign * (j + j0) * (k + k0)) mod N]
ComplexMatrix direct_sum(const ComplexMatrix& in, int sign, long long j0, long long k0, double scale) {
    const Index N = in.rows();
    const auto roots = unit_roots(N);
    ComplexMatrix out = ComplexMatrix::Zero(N, in.cols());
    for (Index j = 0; j < N; ++j)
        for (Index k = 0; k < N; ++k) {
            const Complex w = roots[wrap(sign * (j + j0) * (k + k0), N)];
            out.row(j) += w * in.row(k);
        }
    return out * scale;
}

void require_bins(Index N) {
    if (N < 2) throw DimensionError("transforms need at least 2 samples");
}

// Applies the unscaled forward (sign -1) or inverse (sign +1) FFT to each column.
ComplexMatrix fft_columns(const ComplexMatrix& in, int sign) {
    const Index N = in.rows();
    ComplexMatrix out(N, in.cols());
    Eigen::FFT<double> fft(Eigen::FFT<double>::impl_type(), Eigen::FFT<double>::Unscaled);
    for (Index c = 0; c < in.cols(); ++c) {
        if (sign < 0)
            fft.fwd(out.col(c).data(), in.col(c).data(), N);
        else
            fft.inv(out.col(c).data(), in.col(c).data(), N);
    }
    return out;
}

}  // namespace

TimeSignal idft_standard(const SpectralSignal& X) {
    const Index N = X.size();
    require_bins(N);
    const auto roots = unit_roots(N);
    ComplexMatrix shifted = X.bins;
    for (Index m = 0; m < N; ++m) shifted.row(m) *= roots[m];
    return TimeSignal(fft_columns(shifted, +1) / static_cast<double>(N));
}

SpectralSignal dft_standard(const TimeSignal& x) {
    const Index N = x.size();
    require_bins(N);
    const auto roots = unit_roots(N);
    ComplexMatrix out = fft_columns(x.samples, -1);
    for (Index m = 0; m < N; ++m) out.row(m) *= std::conj(roots[m]);
    return SpectralSignal(std::move(out));
}

TimeSignal idft_time_reversed(const SpectralSignal& Z) {
    const Index N = Z.size();
    require_bins(N);
    return TimeSignal(fft_columns(Z.bins, -1) / static_cast<double>(N));
}

SpectralSignal dft_time_reversed(const TimeSignal& r) {
    const Index N = r.size();
    require_bins(N);
    return SpectralSignal(fft_columns(r.samples, +1));
}

SpectralSignal enforce_conjugate_symmetry(const SpectralSignal& X) {
    const Index N = X.size();
    ComplexMatrix out(N, X.channels());
    for (Index m = 0; m < N; ++m) {
        const Index mirror = (N - m) % N;
        out.row(m) = 0.5 * (X.bins.row(m) + X.bins.row(mirror).conjugate());
    }
    return SpectralSignal(std::move(out));
}

double conjugate_symmetry_error(const SpectralSignal& X) {
    const Index N = X.size();
    double err = 0.0;
    for (Index m = 0; m < N; ++m) {
        const Index mirror = (N - m) % N;
        err = std::max(err, (X.bins.row(m) - X.bins.row(mirror).conjugate()).cwiseAbs().maxCoeff());
    }
    return err;
}

namespace reference {

// Time rows are indexed k = t - 1 and the sums are written in (t, m).

TimeSignal idft_standard(const SpectralSignal& X) {
    require_bins(X.size());
    return TimeSignal(direct_sum(X.bins, +1, 1, 0, 1.0 / static_cast<double>(X.size())));
}

SpectralSignal dft_standard(const TimeSignal& x) {
    require_bins(x.size());
    return SpectralSignal(direct_sum(x.samples, -1, 0, 1, 1.0));
}

TimeSignal idft_time_reversed(const SpectralSignal& Z) {
    require_bins(Z.size());
    // e^{i 2 pi m (1 - t)/N} = e^{-i 2 pi m k / N}
    return TimeSignal(direct_sum(Z.bins, -1, 0, 0, 1.0 / static_cast<double>(Z.size())));
}

SpectralSignal dft_time_reversed(const TimeSignal& r) {
    require_bins(r.size());
    return SpectralSignal(direct_sum(r.samples, +1, 0, 0, 1.0));
}

}  // namespace reference

}  // namespace muprobe
