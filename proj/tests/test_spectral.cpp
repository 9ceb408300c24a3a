#include <doctest.h>

#include "muprobe/random.hpp"
#include "muprobe/spectral.hpp"

using namespace muprobe;

namespace {

SpectralSignal random_spectrum(Rng& rng, Index N, Index n) { return SpectralSignal(complex_gaussian_matrix(rng, N, n)); }

TimeSignal random_time(Rng& rng, Index N, Index n) { return TimeSignal(complex_gaussian_matrix(rng, N, n)); }

double rel(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("idft_standard: DC bin and zeros") {
    const Index N = 8;
    SpectralSignal X = SpectralSignal::zeros(N, 2);
    X.bins(0, 0) = static_cast<double>(N);
    const TimeSignal x = idft_standard(X);
    for (Index t = 0; t < N; ++t) {
        CHECK(std::abs(x.samples(t, 0) - Complex(1.0)) < 1e-15);
        CHECK(std::abs(x.samples(t, 1)) < 1e-15);
    }
    CHECK(idft_standard(SpectralSignal::zeros(5, 3)).samples.norm() == 0.0);
}

TEST_CASE("dft_standard: single sample at t = 1 carries the phase offset") {
    const Index N = 4;
    TimeSignal x(ComplexMatrix::Zero(N, 1));
    x.samples(0, 0) = 1.0;
    const SpectralSignal X = dft_standard(x);
    for (Index m = 0; m < N; ++m)
        CHECK(std::abs(X.bins(m, 0) - std::exp(Complex(0.0, -kTwoPi * static_cast<double>(m) / 4.0))) < 1e-15);
}

TEST_CASE("dft_standard: constant signal") {
    const Index N = 6;
    const SpectralSignal X = dft_standard(TimeSignal(ComplexMatrix::Ones(N, 1)));
    CHECK(std::abs(X.bins(0, 0) - Complex(6.0)) < 1e-14);
    for (Index m = 1; m < N; ++m) CHECK(std::abs(X.bins(m, 0)) < 1e-14);
}

TEST_CASE("idft_time_reversed: DC and index-shift identity") {
    Rng rng(3);
    const Index N = 8;
    SpectralSignal X = SpectralSignal::zeros(N, 1);
    X.bins(0, 0) = static_cast<double>(N);
    const TimeSignal x = idft_time_reversed(X);
    for (Index t = 0; t < N; ++t) CHECK(std::abs(x.samples(t, 0) - Complex(1.0)) < 1e-15);

    for (Index len : {7, 8, 12}) {
        const SpectralSignal Z = random_spectrum(rng, len, 2);
        const TimeSignal rev = idft_time_reversed(Z);
        const TimeSignal std_ = idft_standard(Z);
        for (Index t = 1; t <= len; ++t) {
            // (1 - t) mod N, mapped into 1..N
            Index s = ((1 - t) % len + len) % len;
            if (s == 0) s = len;
            CHECK((rev.samples.row(t - 1) - std_.samples.row(s - 1)).norm() < 1e-12);
        }
    }
}

TEST_CASE("dft_time_reversed: DC, single sample, kernel") {
    const Index N = 5;
    const SpectralSignal dc = dft_time_reversed(TimeSignal(ComplexMatrix::Ones(N, 1)));
    CHECK(std::abs(dc.bins(0, 0) - Complex(5.0)) < 1e-14);
    for (Index m = 1; m < N; ++m) CHECK(std::abs(dc.bins(m, 0)) < 1e-14);

    TimeSignal x(ComplexMatrix::Zero(N, 1));
    x.samples(0, 0) = 1.0;  // t = 1 has no phase under the reversed kernel
    const SpectralSignal X = dft_time_reversed(x);
    for (Index m = 0; m < N; ++m) CHECK(std::abs(X.bins(m, 0) - Complex(1.0)) < 1e-15);

    x.samples(0, 0) = 0.0;
    x.samples(2, 0) = 1.0;  // t = 3
    const SpectralSignal Y = dft_time_reversed(x);
    for (Index m = 0; m < N; ++m)
        CHECK(std::abs(Y.bins(m, 0) - std::exp(Complex(0.0, kTwoPi * 2.0 * static_cast<double>(m) / 5.0))) < 1e-14);
}

TEST_CASE("transform pairs invert") {
    Rng rng(1);
    for (Index N : {2, 3, 16, 100, 257, 1024}) {
        const SpectralSignal X = random_spectrum(rng, N, 3);
        CHECK(rel(dft_standard(idft_standard(X)).bins, X.bins) < 1e-12);
        CHECK(rel(dft_time_reversed(idft_time_reversed(X)).bins, X.bins) < 1e-12);
        const TimeSignal x = random_time(rng, N, 2);
        CHECK(rel(idft_standard(dft_standard(x)).samples, x.samples) < 1e-12);
        CHECK(rel(idft_time_reversed(dft_time_reversed(x)).samples, x.samples) < 1e-12);
    }
}

TEST_CASE("Parseval with the 1/N convention") {
    Rng rng(2);
    for (Index N : {4, 33, 512}) {
        const TimeSignal x = random_time(rng, N, 2);
        const double e_time = x.samples.squaredNorm();
        CHECK(dft_standard(x).energy() / static_cast<double>(N) == doctest::Approx(e_time).epsilon(1e-12));
        CHECK(dft_time_reversed(x).energy() / static_cast<double>(N) == doctest::Approx(e_time).epsilon(1e-12));
    }
}

TEST_CASE("fast transforms match the direct summations") {
    Rng rng(4);
    for (Index N : {2, 5, 64, 90, 127}) {
        const SpectralSignal X = random_spectrum(rng, N, 2);
        const TimeSignal x = random_time(rng, N, 2);
        CHECK(rel(idft_standard(X).samples, reference::idft_standard(X).samples) < 1e-10);
        CHECK(rel(idft_time_reversed(X).samples, reference::idft_time_reversed(X).samples) < 1e-10);
        CHECK(rel(dft_standard(x).bins, reference::dft_standard(x).bins) < 1e-10);
        CHECK(rel(dft_time_reversed(x).bins, reference::dft_time_reversed(x).bins) < 1e-10);
    }
}

TEST_CASE("transforms are linear") {
    Rng rng(5);
    const SpectralSignal X = random_spectrum(rng, 20, 2), Y = random_spectrum(rng, 20, 2);
    const Complex c(0.3, -1.7);
    const ComplexMatrix lhs = idft_time_reversed(SpectralSignal(X.bins + c * Y.bins)).samples;
    const ComplexMatrix rhs = idft_time_reversed(X).samples + c * idft_time_reversed(Y).samples;
    CHECK(rel(lhs, rhs) < 1e-13);
}

TEST_CASE("enforce_conjugate_symmetry") {
    Rng rng(6);
    SUBCASE("averaging formula") {
        SpectralSignal X = SpectralSignal::zeros(4, 1);
        X.bins(1, 0) = Complex(1.0, 1.0);
        const SpectralSignal Y = enforce_conjugate_symmetry(X);
        CHECK(std::abs(Y.bins(1, 0) - Complex(0.5, 0.5)) < 1e-16);
        CHECK(std::abs(Y.bins(3, 0) - Complex(0.5, -0.5)) < 1e-16);
        CHECK(std::abs(Y.bins(0, 0)) == 0.0);
    }
    SUBCASE("fixed point and real inverse") {
        for (Index N : {8, 9}) {
            const SpectralSignal S = enforce_conjugate_symmetry(random_spectrum(rng, N, 3));
            CHECK(conjugate_symmetry_error(S) < 1e-15);
            CHECK(std::abs(S.bins(0, 0).imag()) < 1e-16);
            if (N % 2 == 0) CHECK(std::abs(S.bins(N / 2, 1).imag()) < 1e-16);
            CHECK(rel(enforce_conjugate_symmetry(S).bins, S.bins) == 0.0);
            CHECK(idft_standard(S).max_imag() < 1e-12);
            CHECK(idft_time_reversed(S).max_imag() < 1e-12);
        }
    }
    SUBCASE("real signals have symmetric spectra") {
        const TimeSignal x = TimeSignal::from_real(gaussian_matrix(rng, 31, 2));
        CHECK(conjugate_symmetry_error(dft_standard(x)) < 1e-12);
        CHECK(conjugate_symmetry_error(dft_time_reversed(x)) < 1e-12);
    }
}
