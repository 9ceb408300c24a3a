#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "muprobe/blocks.hpp"
#include "muprobe/lti.hpp"
#include "muprobe/spectral.hpp"
#include "muprobe/types.hpp"

namespace muprobe {

/// The only access the estimator has to the plant: submit an N x n real input
/// period, receive the N x n (steady-state, possibly noisy) output period.
class ExperimentOracle {
public:
    virtual ~ExperimentOracle() = default;

    virtual Index channels() const = 0;
    virtual RealMatrix run(const RealMatrix& input) = 0;

    /// True when concurrent run() calls are safe and order-independent.
    virtual bool reentrant() const { return false; }
};

/// Oracle backed by simulate_periodic on a known model. Each call draws fresh
/// noise seeded from (noise.seed, call index), so noisy oracles are only
/// deterministic under sequential use and declare themselves non-reentrant.
class SimulatedOracle final : public ExperimentOracle {
public:
    explicit SimulatedOracle(StateSpaceModel model, int warm_periods = 5, NoiseSpec noise = {});

    Index channels() const override { return model_.n(); }
    RealMatrix run(const RealMatrix& input) override;
    bool reentrant() const override { return !noise_.active(); }

    const StateSpaceModel& model() const noexcept { return model_; }
    std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    StateSpaceModel model_;
    int warm_periods_;
    NoiseSpec noise_;
    std::atomic<std::uint64_t> calls_{0};
};

/// Forwards to another oracle and counts the experiments.
class CountingOracle final : public ExperimentOracle {
public:
    explicit CountingOracle(ExperimentOracle& inner) : inner_(inner) {}

    Index channels() const override { return inner_.channels(); }
    RealMatrix run(const RealMatrix& input) override {
        ++count_;
        return inner_.run(input);
    }
    bool reentrant() const override { return inner_.reentrant(); }

    std::uint64_t count() const noexcept { return count_.load(); }

private:
    ExperimentOracle& inner_;
    std::atomic<std::uint64_t> count_{0};
};

/// Raised when a whole spectral signal vanishes; the run restarts.
class ZeroSignalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    Index N = 1024;
    std::uint64_t seed = 0;
    double tol = 1e-4;
    int max_iter = 100;
    int max_restarts = 5;
    /// Once the peak bin converges at tol, iterate on (at most refine_iter more
    /// passes) until it is stationary to refine_tol. A loose tol alone leaves
    /// min(mu~, mu-) up to ~tol/10 off the fixed point, on either side.
    double refine_tol = 1e-10;
    int refine_iter = 30;
    bool real_mode = true;
    double tol_zero = 1e-12;
    double degeneracy_tol = kDegeneracyTol;
    std::size_t threads = 0;  ///< adjoint experiment workers when the oracle is reentrant
};

/// Per-frequency vectors of the iteration. All signals are N x n. `B_in` is
/// the excitation that produced the current `P`, so P[m] = G(e^{i w_m}) B_in[m]
/// and R[m] = G(e^{i w_m})^H Z[m] hold bin-wise after a pass.
struct IterationState {
    SpectralSignal B, W, A, Z, P, R, B_in;
    std::vector<double> mu_tilde, mu_bar;
    std::vector<char> degenerate;  ///< bin masked this iteration
    int l = 0;
    std::uint64_t experiments = 0;
    double max_input_imag = 0.0;  ///< largest discarded imaginary part of an oracle input

    Index size() const noexcept { return B.size(); }
};

/// Random complex Gaussian B[0,:], W[0,:] (conjugate-symmetrised in real
/// mode), each scaled to unit total energy.
IterationState init_state(Index N, const BlockStructure& structure, std::uint64_t seed, bool real_mode);

/// One experiment on the plant: b = idft(B), p = G b, P = dft(p); per bin
/// mu~ = |P|/|B|, A = P/|P|, Z = update_z(W, A). Bins whose response is
/// negligible or whose z-update is degenerate are masked and left unchanged.
void forward_pass(IterationState& state, ExperimentOracle& oracle, const BlockStructure& structure,
                  const RunOptions& options);

/// n^2 experiments realising G^T through single-channel masking on the
/// time-reversed z; then per bin mu- = |R|/|Z|, W = R/|R|, B = update_b(A, W).
void adjoint_pass(IterationState& state, ExperimentOracle& oracle, const BlockStructure& structure,
                  const RunOptions& options);

/// Scales B to unit total energy; throws ZeroSignalError when it vanishes.
void normalize(IterationState& state, double tol_zero = 1e-12);

struct ConvergenceReport {
    std::vector<char> bins;
    Index peak_bin = -1;
    bool global = false;
};

/// Peak bin = argmax over unmasked bins of min(mu~, mu-) (lowest index on
/// ties). A bin converged when mu~ and mu- agree and neither moved since
/// `previous`, all relative to tol. The global flag follows the peak bin.
ConvergenceReport check_convergence(const IterationState& state, const IterationState& previous, double tol);

/// Index of the largest min(mu~, mu-) among unmasked bins, -1 if none.
Index peak_bin(const IterationState& state);

struct MuEstimate {
    double mu = 0.0;
    Index peak_bin = -1;
    double peak_omega = 0.0;
    std::vector<double> mu_tilde_curve, mu_bar_curve;
    std::vector<char> converged_bins;
    int iterations = 0;          ///< across all attempts
    int attempt_iterations = 0;  ///< in the reported attempt
    int restarts = 0;
    std::uint64_t experiments = 0;
    bool converged = false;
    bool zero_gain = false;  ///< every attempt collapsed; mu reported as 0
    std::vector<std::pair<double, double>> history;  ///< (mu~, mu-) at the peak, per iteration
    double max_input_imag = 0.0;
    double max_symmetry_error = 0.0;  ///< B and W, real mode only
    IterationState state;              ///< final state of the reported attempt
};

using IterationObserver = std::function<void(const IterationState&)>;

/// Data-driven lower bound on mu over the N-point frequency grid.
MuEstimate run(ExperimentOracle& oracle, const BlockStructure& structure, const RunOptions& options,
               const IterationObserver& observer = {});

}  // namespace muprobe
