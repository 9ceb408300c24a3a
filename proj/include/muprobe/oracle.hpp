#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "muprobe/blocks.hpp"
#include "muprobe/lti.hpp"
#include "muprobe/random.hpp"
#include "muprobe/types.hpp"

namespace muprobe {

/// Largest singular value.
double max_singular_value(const ComplexMatrix& M);

/// Largest eigenvalue magnitude.
double spectral_radius(const ComplexMatrix& M);

/// mu for a single full block: the whole unit ball is admissible, so mu = sigma_max(M).
double exact_single_full(const ComplexMatrix& M);

/// mu for a single repeated-scalar block delta I: det(I + delta M) = 0 iff
/// -1/delta is an eigenvalue, so mu = rho(M) (0 when M is nilpotent).
double exact_single_repeated_scalar(const ComplexMatrix& M);

/// Uniform phase per repeated-scalar block, Haar unitary per full block.
ComplexMatrix random_structured_unitary(const BlockStructure& structure, Rng& rng);

/// max rho(Q M) over Q = I and `samples` random structured unitaries. Every
/// candidate is a valid lower bound on mu.
double random_search_lower_bound(const ComplexMatrix& M, const BlockStructure& structure, std::size_t samples,
                                 std::uint64_t seed);

/// min sigma_max(D M D^{-1}) by coordinate descent on log-scalings, with D
/// positive diagonal inside each repeated-scalar block and d_k I on full
/// block k. `iters` sweeps, starting from D = I; never increases with iters.
double diag_scaling_upper_bound(const ComplexMatrix& M, const BlockStructure& structure, int iters = 50);

struct HinfPeak {
    double value = 0.0;
    Index bin = 0;
    double omega = 0.0;
};

/// max over m of sigma_max(G(e^{i 2 pi m / grid_size})).
HinfPeak hinf_grid_peak(const StateSpaceModel& model, Index grid_size);
double hinf_grid(const StateSpaceModel& model, Index grid_size);

struct BoundsReport {
    double lower = 0.0;
    double upper = 0.0;
    std::string lower_method;
    std::string upper_method;
};

struct BoundsOptions {
    std::size_t samples = 20000;
    int iters = 50;
    std::uint64_t seed = 0;
};

/// Lower bound: best of random search and the model-based power iteration
/// (when converged) or the exact value for single-block structures. Upper
/// bound: diagonal scaling (exact for single full blocks).
BoundsReport bounds(const ComplexMatrix& M, const BlockStructure& structure, const BoundsOptions& options = {});

nlohmann::json to_json(const BoundsReport& report);

}  // namespace muprobe
