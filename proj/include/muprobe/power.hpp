#pragma once

#include <cstdint>
#include <vector>

#include "muprobe/blocks.hpp"
#include "muprobe/lti.hpp"
#include "muprobe/types.hpp"

namespace muprobe {

enum class PowerStatus {
    Converged,
    NotConverged,  ///< max_iter reached on every attempt; best value reported
    ZeroGain,      ///< every attempt collapsed; mu' taken as 0
};

const char* to_string(PowerStatus s);

struct PowerIterationOptions {
    std::uint64_t seed = 0;
    double tol = 1e-8;
    int max_iter = 500;
    int max_restarts = 5;
    double degeneracy_tol = kDegeneracyTol;
    /// After converging at tol, keep iterating (at most refine_iter steps)
    /// until stationary to refine_tol.
    double refine_tol = 1e-14;
    int refine_iter = 200;
};

/// Outcome of the static power iteration on one complex matrix. `mu` is the
/// reported lower bound: the equilibrium mu_tilde when converged, the best
/// mu_tilde seen otherwise, 0 on the zero-gain path.
struct PowerIterationResult {
    double mu = 0.0;
    double mu_tilde = 0.0;
    double mu_bar = 0.0;
    int iterations = 0;  ///< iterations of the final attempt
    int restarts = 0;
    PowerStatus status = PowerStatus::NotConverged;
    ComplexVector a, b, w, z;

    bool converged() const noexcept { return status == PowerStatus::Converged; }
};

/// Lower bound on mu'_Delta(M) by alternating
///   mu~ = |M b|, a = M b / mu~, z = update_z(w, a),
///   mu- = |M^H z|, w = M^H z / mu-, b = update_b(a, w)
/// from random unit b(0), w(0) until mu~ and mu- agree and stop moving.
PowerIterationResult model_power_iteration(const ComplexMatrix& M, const BlockStructure& structure,
                                           const PowerIterationOptions& options = {});

struct GridMuResult {
    std::vector<PowerIterationResult> bins;  ///< one per frequency 2 pi m / N
    std::vector<double> mu_curve;            ///< bins[m].mu
    double peak = 0.0;       ///< max over converged bins (all bins if none converged)
    Index peak_bin = -1;
    bool peak_converged = false;
};

/// Runs model_power_iteration on freq_response(model, 2 pi m / N) for every
/// m. The random start of bin m is seeded from (options.seed, m), so the
/// result does not depend on `threads` (0 = worker_count()).
GridMuResult model_mu_over_grid(const StateSpaceModel& model, const BlockStructure& structure, Index N,
                                const PowerIterationOptions& options = {}, std::size_t threads = 0);

}  // namespace muprobe
