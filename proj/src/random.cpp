#include "muprobe/random.hpp"

#include <cmath>

namespace muprobe {

RealMatrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
}

ComplexMatrix complex_gaussian_matrix(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = Complex(re, im);
        }
    return out;
}

ComplexVector complex_gaussian_vector(Rng& rng, Index size) {
    return complex_gaussian_matrix(rng, size, 1).col(0);
}

RealMatrix haar_orthogonal(Rng& rng, Index n) {
    const RealMatrix g = gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ();
    const RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

ComplexMatrix haar_unitary(Rng& rng, Index n) {
    const ComplexMatrix g = complex_gaussian_matrix(rng, n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    for (Index j = 0; j < n; ++j) {
        const Complex d = qr.matrixQR()(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return q;
}

Complex random_phase(Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    return std::polar(1.0, angle(rng));
}

}  // namespace muprobe
