#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "muprobe/types.hpp"

namespace muprobe {

/// Discrete-time square MIMO plant
///
///     x_{k+1} = A x_k + B u_k,   y_k = C x_k + D u_k
///
/// with n inputs/outputs and n_x states. The constructor enforces matching
/// dimensions and asymptotic stability (spectral radius of A strictly below
/// one); instances are immutable afterwards.
class StateSpaceModel {
public:
    StateSpaceModel(RealMatrix A, RealMatrix B, RealMatrix C, RealMatrix D);

    const RealMatrix& A() const noexcept { return A_; }
    const RealMatrix& B() const noexcept { return B_; }
    const RealMatrix& C() const noexcept { return C_; }
    const RealMatrix& D() const noexcept { return D_; }

    Index n() const noexcept { return B_.cols(); }
    Index n_x() const noexcept { return A_.rows(); }

    bool strictly_proper() const noexcept { return D_.isZero(0.0); }
    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    RealMatrix A_, B_, C_, D_;
    double spectral_radius_ = 0.0;
};

/// Additive per-channel output disturbance e_k ~ N(0, variance), i.i.d.
struct NoiseSpec {
    double variance = 0.0;
    std::uint64_t seed = 0;

    bool active() const noexcept { return variance > 0.0; }
};

/// Response of the plant to `input` (T x n, one row per sample) from zero
/// initial state. Noise is added to every output sample when active.
RealMatrix simulate(const StateSpaceModel& model, const RealMatrix& input,
                    const NoiseSpec& noise = {});

/// Applies the N-sample `period` repeated warm_periods + 1 times from zero
/// state and returns the final period. Noise, when active, only touches the
/// returned samples.
RealMatrix simulate_periodic(const StateSpaceModel& model, const RealMatrix& period,
                             int warm_periods, const NoiseSpec& noise = {});

/// D + C (e^{i omega} I - A)^{-1} B.
ComplexMatrix freq_response(const StateSpaceModel& model, double omega);

/// (A^T, C^T, B^T, D^T); realises G(z)^T.
StateSpaceModel transpose_model(const StateSpaceModel& model);

/// Strictly proper plant with A = rho * Q, Q Haar-orthogonal and rho drawn
/// uniformly from [min(0.3, pole_radius_max), pole_radius_max]; B and C have
/// standard Gaussian entries.
StateSpaceModel random_stable(Index n, Index n_x, double pole_radius_max, std::uint64_t seed);

/// Largest eigenvalue magnitude of a real square matrix.
double spectral_radius(const RealMatrix& m);

nlohmann::json to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const nlohmann::json& j);

}  // namespace muprobe
