#include "muprobe/datadriven.hpp"

#include <algorithm>
#include <cmath>

#include "muprobe/parallel.hpp"
#include "muprobe/random.hpp"

namespace muprobe {

SimulatedOracle::SimulatedOracle(StateSpaceModel model, int warm_periods, NoiseSpec noise)
    : model_(std::move(model)), warm_periods_(warm_periods), noise_(noise) {
    if (warm_periods < 0) throw std::invalid_argument("warm_periods must be non-negative");
    if (noise.variance < 0.0) throw std::invalid_argument("noise variance must be non-negative");
}

RealMatrix SimulatedOracle::run(const RealMatrix& input) {
    const std::uint64_t call = calls_.fetch_add(1);
    NoiseSpec noise = noise_;
    noise.seed = derive_seed(noise_.seed, call);
    return simulate_periodic(model_, input, warm_periods_, noise);
}

namespace {

// Sends a complex time signal through the oracle. In real mode the signal is
// real up to rounding: the imaginary residue is recorded and dropped. In
// complex mode the real and imaginary parts are two experiments.
ComplexMatrix probe(ExperimentOracle& oracle, const ComplexMatrix& signal, bool real_mode, double& max_imag,
                    std::uint64_t& experiments) {
    if (real_mode) {
        if (signal.size() > 0) max_imag = std::max(max_imag, signal.imag().cwiseAbs().maxCoeff());
        ++experiments;
        return oracle.run(signal.real()).cast<Complex>();
    }
    experiments += 2;
    const RealMatrix re = oracle.run(signal.real());
    const RealMatrix im = oracle.run(signal.imag());
    ComplexMatrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

double max_bin_norm(const SpectralSignal& s) {
    return s.size() ? s.bins.rowwise().norm().maxCoeff() : 0.0;
}

}  // namespace

IterationState init_state(Index N, const BlockStructure& structure, std::uint64_t seed, bool real_mode) {
    if (N < 2) throw std::invalid_argument("N must be >= 2");
    const Index n = structure.n();
    Rng rng(seed);
    IterationState st;
    st.B = SpectralSignal(complex_gaussian_matrix(rng, N, n));
    st.W = SpectralSignal(complex_gaussian_matrix(rng, N, n));
    if (real_mode) {
        st.B = enforce_conjugate_symmetry(st.B);
        st.W = enforce_conjugate_symmetry(st.W);
    }
    st.B.bins /= std::sqrt(st.B.energy());
    st.W.bins /= std::sqrt(st.W.energy());
    st.A = st.Z = st.P = st.R = st.B_in = SpectralSignal::zeros(N, n);
    st.mu_tilde.assign(static_cast<std::size_t>(N), 0.0);
    st.mu_bar.assign(static_cast<std::size_t>(N), 0.0);
    st.degenerate.assign(static_cast<std::size_t>(N), 0);
    return st;
}

void forward_pass(IterationState& st, ExperimentOracle& oracle, const BlockStructure& structure,
                  const RunOptions& options) {
    const Index N = st.size();
    const TimeSignal b = idft_standard(st.B);
    const ComplexMatrix p = probe(oracle, b.samples, options.real_mode, st.max_input_imag, st.experiments);
    st.P = dft_standard(TimeSignal(p));
    st.B_in = st.B;
    std::fill(st.degenerate.begin(), st.degenerate.end(), 0);

    const double max_p = max_bin_norm(st.P);
    if (!(max_p > 0.0) || !std::isfinite(max_p)) {
        std::fill(st.degenerate.begin(), st.degenerate.end(), 1);
        throw ZeroSignalError("plant response vanished at every bin");
    }

    for (Index m = 0; m < N; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const ComplexVector pm = st.P.bin(m);
        const double pn = pm.norm();
        const double bn = st.B.bins.row(m).norm();
        if (pn <= options.tol_zero * max_p || bn == 0.0) {
            st.degenerate[mi] = 1;
            continue;
        }
        st.mu_tilde[mi] = pn / bn;
        const ComplexVector a = pm / pn;
        st.A.set_bin(m, a);
        try {
            st.Z.set_bin(m, update_z(structure, st.W.bin(m), a, options.degeneracy_tol));
        } catch (const DegenerateBlockError&) {
            st.degenerate[mi] = 1;
        }
    }
}

void adjoint_pass(IterationState& st, ExperimentOracle& oracle, const BlockStructure& structure,
                  const RunOptions& options) {
    const Index N = st.size();
    const Index n = structure.n();
    const TimeSignal z = idft_time_reversed(st.Z);

    // G^T = sum_{alpha,beta} e_alpha e_beta^T G e_alpha e_beta^T: channel
    // alpha of the input carries z_beta, output channel beta lands in r_alpha.
    const std::size_t pairs = static_cast<std::size_t>(n * n);
    std::vector<ComplexVector> outputs(pairs);
    std::vector<double> imag(pairs, 0.0);
    std::vector<std::uint64_t> counts(pairs, 0);
    const std::size_t workers = oracle.reentrant() ? options.threads : 1;
    parallel_for(
        pairs,
        [&](std::size_t k) {
            const Index alpha = static_cast<Index>(k) / n;
            const Index beta = static_cast<Index>(k) % n;
            ComplexMatrix input = ComplexMatrix::Zero(N, n);
            input.col(alpha) = z.samples.col(beta);
            const ComplexMatrix y = probe(oracle, input, options.real_mode, imag[k], counts[k]);
            outputs[k] = y.col(beta);
        },
        workers);

    ComplexMatrix r = ComplexMatrix::Zero(N, n);
    for (std::size_t k = 0; k < pairs; ++k) {
        r.col(static_cast<Index>(k) / n) += outputs[k];
        st.max_input_imag = std::max(st.max_input_imag, imag[k]);
        st.experiments += counts[k];
    }
    st.R = dft_time_reversed(TimeSignal(std::move(r)));

    const double max_r = max_bin_norm(st.R);
    if (!(max_r > 0.0) || !std::isfinite(max_r)) {
        std::fill(st.degenerate.begin(), st.degenerate.end(), 1);
        throw ZeroSignalError("adjoint response vanished at every bin");
    }

    for (Index m = 0; m < N; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        if (st.degenerate[mi]) continue;
        const ComplexVector rm = st.R.bin(m);
        const double rn = rm.norm();
        const double zn = st.Z.bins.row(m).norm();
        if (rn <= options.tol_zero * max_r || zn == 0.0) {
            st.degenerate[mi] = 1;
            continue;
        }
        st.mu_bar[mi] = rn / zn;
        const ComplexVector w = rm / rn;
        st.W.set_bin(m, w);
        try {
            st.B.set_bin(m, update_b(structure, st.A.bin(m), w, options.degeneracy_tol));
        } catch (const DegenerateBlockError&) {
            st.degenerate[mi] = 1;
        }
    }
}

void normalize(IterationState& st, double tol_zero) {
    const double energy = st.B.energy();
    if (!(energy >= tol_zero) || !std::isfinite(energy)) throw ZeroSignalError("excitation energy vanished");
    st.B.bins /= std::sqrt(energy);
}

Index peak_bin(const IterationState& st) {
    return tied_argmax(
        static_cast<Index>(st.mu_tilde.size()),
        [&](Index m) { return std::min(st.mu_tilde[static_cast<std::size_t>(m)], st.mu_bar[static_cast<std::size_t>(m)]); },
        [&](Index m) { return st.degenerate.empty() || !st.degenerate[static_cast<std::size_t>(m)]; });
}

ConvergenceReport check_convergence(const IterationState& st, const IterationState& prev, double tol) {
    const std::size_t N = st.mu_tilde.size();
    if (prev.mu_tilde.size() != N || prev.mu_bar.size() != N)
        throw DimensionError("previous state has a different number of bins");
    ConvergenceReport rep;
    rep.bins.assign(N, 0);
    for (std::size_t m = 0; m < N; ++m) {
        if ((!st.degenerate.empty() && st.degenerate[m]) || (!prev.degenerate.empty() && prev.degenerate[m]))
            continue;
        const double t = st.mu_tilde[m], b = st.mu_bar[m];
        const double scale = std::max(t, b);
        rep.bins[m] = std::abs(t - b) <= tol * scale && std::abs(t - prev.mu_tilde[m]) <= tol * t &&
                      std::abs(b - prev.mu_bar[m]) <= tol * b;
    }
    rep.peak_bin = peak_bin(st);
    rep.global = rep.peak_bin >= 0 && rep.bins[static_cast<std::size_t>(rep.peak_bin)];
    return rep;
}

namespace {

MuEstimate summarize(IterationState st, const ConvergenceReport& rep, bool converged, Index N) {
    MuEstimate est;
    est.mu_tilde_curve = st.mu_tilde;
    est.mu_bar_curve = st.mu_bar;
    est.converged_bins = rep.bins.empty() ? std::vector<char>(static_cast<std::size_t>(N), 0) : rep.bins;
    est.converged = converged;
    auto value = [&](Index m) {
        return std::min(st.mu_tilde[static_cast<std::size_t>(m)], st.mu_bar[static_cast<std::size_t>(m)]);
    };
    est.peak_bin = tied_argmax(N, value, [&](Index m) {
        const auto mi = static_cast<std::size_t>(m);
        return !st.degenerate[mi] && (!converged || est.converged_bins[mi]);
    });
    if (est.peak_bin >= 0) est.mu = value(est.peak_bin);
    if (est.peak_bin >= 0) est.peak_omega = kTwoPi * static_cast<double>(est.peak_bin) / static_cast<double>(N);
    est.attempt_iterations = st.l;
    est.state = std::move(st);
    return est;
}

}  // namespace

MuEstimate run(ExperimentOracle& oracle, const BlockStructure& structure, const RunOptions& options,
               const IterationObserver& observer) {
    if (oracle.channels() != structure.n())
        throw DimensionError("oracle has " + std::to_string(oracle.channels()) + " channels, structure n = " +
                             std::to_string(structure.n()));
    if (options.N < 2) throw std::invalid_argument("N must be >= 2");
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (options.max_restarts < 0) throw std::invalid_argument("max_restarts must be >= 0");
    if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");

    const Index N = options.N;
    MuEstimate best;
    bool have_best = false;
    int total_iterations = 0;
    std::uint64_t total_experiments = 0;
    double max_imag = 0.0;

    for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
        IterationState st =
            init_state(N, structure, derive_seed(options.seed, static_cast<std::uint64_t>(attempt)), options.real_mode);
        IterationState prev;
        ConvergenceReport rep;
        std::vector<std::pair<double, double>> history;
        double sym_err = 0.0;
        bool collapsed = false;
        bool converged = false;
        bool refining = false;
        Index refine_bin = -1;
        int refine_left = options.refine_iter;
        IterationState snapshot;
        ConvergenceReport snapshot_rep;
        std::uint64_t spent = 0;  // experiments and input residue discarded by a revert
        double spent_imag = 0.0;

        for (int l = 1; l <= options.max_iter; ++l) {
            try {
                forward_pass(st, oracle, structure, options);
                adjoint_pass(st, oracle, structure, options);
                normalize(st, options.tol_zero);
            } catch (const ZeroSignalError&) {
                if (refining) {
                    spent = st.experiments;
                    spent_imag = st.max_input_imag;
                    st = std::move(snapshot);
                    rep = std::move(snapshot_rep);
                } else {
                    collapsed = true;
                }
                break;
            }
            st.l = l;
            ++total_iterations;
            if (options.real_mode)
                sym_err = std::max({sym_err, conjugate_symmetry_error(st.B), conjugate_symmetry_error(st.W)});
            const Index pk = peak_bin(st);
            history.emplace_back(pk >= 0 ? st.mu_tilde[static_cast<std::size_t>(pk)] : 0.0,
                                 pk >= 0 ? st.mu_bar[static_cast<std::size_t>(pk)] : 0.0);
            if (observer) observer(st);
            if (l >= 2) {
                rep = check_convergence(st, prev, options.tol);
                // An unconverged bin may briefly overtake the peak while refining; only
                // the bin that converged has to stay put.
                if (refining && !rep.bins[static_cast<std::size_t>(refine_bin)]) {
                    // Drifted away from the tol-level fixed point: keep the last state that met it.
                    spent = st.experiments;
                    spent_imag = st.max_input_imag;
                    st = std::move(snapshot);
                    rep = std::move(snapshot_rep);
                    break;
                }
                if (refining || rep.global) {
                    converged = true;
                    if (!refining) refine_bin = rep.peak_bin;
                    if (refine_left <= 0 ||
                        check_convergence(st, prev, options.refine_tol).bins[static_cast<std::size_t>(refine_bin)])
                        break;
                    --refine_left;
                    refining = true;
                    snapshot = st;
                    snapshot_rep = rep;
                }
            }
            prev.mu_tilde = st.mu_tilde;
            prev.mu_bar = st.mu_bar;
            prev.degenerate = st.degenerate;
        }
        total_experiments += std::max(spent, st.experiments);
        max_imag = std::max({max_imag, spent_imag, st.max_input_imag});
        if (collapsed) continue;

        MuEstimate est = summarize(std::move(st), rep, converged, N);
        est.history = std::move(history);
        est.max_symmetry_error = sym_err;
        est.restarts = attempt;
        if (converged) {
            best = std::move(est);
            have_best = true;
            break;
        }
        if (!have_best || est.mu > best.mu) {
            best = std::move(est);
            have_best = true;
        }
        best.restarts = attempt;
    }

    if (!have_best) {
        best = MuEstimate{};
        best.zero_gain = true;
        best.restarts = options.max_restarts;
        best.mu_tilde_curve.assign(static_cast<std::size_t>(N), 0.0);
        best.mu_bar_curve.assign(static_cast<std::size_t>(N), 0.0);
        best.converged_bins.assign(static_cast<std::size_t>(N), 0);
    }
    best.iterations = total_iterations;
    best.experiments = total_experiments;
    best.max_input_imag = max_imag;
    return best;
}

}  // namespace muprobe
