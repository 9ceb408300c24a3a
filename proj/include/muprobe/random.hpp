#pragma once

#include <cstdint>
#include <random>

#include "muprobe/types.hpp"

namespace muprobe {

using Rng = std::mt19937_64;

/// Standard real Gaussian matrix.
RealMatrix gaussian_matrix(Rng& rng, Index rows, Index cols);

/// Circularly-symmetric complex Gaussian entries, E|x|^2 = 1.
ComplexMatrix complex_gaussian_matrix(Rng& rng, Index rows, Index cols);
ComplexVector complex_gaussian_vector(Rng& rng, Index size);

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
RealMatrix haar_orthogonal(Rng& rng, Index n);

/// Haar-distributed unitary matrix (QR of a complex Gaussian with phase fix).
ComplexMatrix haar_unitary(Rng& rng, Index n);

/// Uniform phase e^{i theta}, theta in [0, 2pi).
Complex random_phase(Rng& rng);

}  // namespace muprobe
