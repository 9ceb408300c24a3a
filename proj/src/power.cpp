#include "muprobe/power.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "muprobe/oracle.hpp"
#include "muprobe/parallel.hpp"
#include "muprobe/random.hpp"

namespace muprobe {

const char* to_string(PowerStatus s) {
    switch (s) {
        case PowerStatus::Converged: return "converged";
        case PowerStatus::NotConverged: return "not_converged";
        case PowerStatus::ZeroGain: return "zero_gain";
    }
    return "unknown";
}

namespace {

enum class AttemptEnd { Converged, MaxIter, Collapsed };

struct Attempt {
    AttemptEnd end = AttemptEnd::MaxIter;
    double mu_tilde = 0.0, mu_bar = 0.0;
    double best = 0.0;  // max over iterations of min(mu_tilde, mu_bar)
    int iterations = 0;
    ComplexVector a, b, w, z;
};

Attempt run_attempt(const ComplexMatrix& M, const BlockStructure& structure, const PowerIterationOptions& opt,
                    Rng& rng, double zero_level) {
    const Index n = M.rows();
    Attempt at;
    at.b = complex_gaussian_vector(rng, n).normalized();
    at.w = complex_gaussian_vector(rng, n).normalized();
    const ComplexMatrix MH = M.adjoint();

    double prev_t = 0.0, prev_b = 0.0;
    bool refining = false;
    int refine_left = opt.refine_iter;
    Attempt snapshot;
    auto collapse = [&]() -> Attempt {
        if (refining) return std::move(snapshot);
        at.end = AttemptEnd::Collapsed;
        return std::move(at);
    };
    for (int l = 1; l <= opt.max_iter; ++l) {
        at.iterations = l;
        ComplexVector mb = M * at.b;
        const double mt = mb.norm();
        if (!(mt > zero_level)) {
            return collapse();
        }
        at.a = mb / mt;
        try {
            at.z = update_z(structure, at.w, at.a, opt.degeneracy_tol);
        } catch (const DegenerateBlockError&) {
            return collapse();
        }
        ComplexVector mz = MH * at.z;
        const double mbar = mz.norm();
        if (!(mbar > zero_level)) {
            return collapse();
        }
        at.w = mz / mbar;
        try {
            at.b = update_b(structure, at.a, at.w, opt.degeneracy_tol);
        } catch (const DegenerateBlockError&) {
            return collapse();
        }
        at.mu_tilde = mt;
        at.mu_bar = mbar;
        at.best = std::max(at.best, std::min(mt, mbar));

        if (l >= 2) {
            const double scale = std::max(mt, mbar);
            auto settled = [&](double tol) {
                return std::abs(mt - mbar) <= tol * scale && std::abs(mt - prev_t) <= tol * scale &&
                       std::abs(mbar - prev_b) <= tol * scale;
            };
            if (refining && !settled(opt.tol)) {
                at = std::move(snapshot);
                return at;
            }
            if (settled(opt.tol)) {
                at.end = AttemptEnd::Converged;
                if (refine_left <= 0 || settled(opt.refine_tol)) return at;
                --refine_left;
                refining = true;
                snapshot = at;
            }
        }
        prev_t = mt;
        prev_b = mbar;
    }
    if (refining) return at;
    at.end = AttemptEnd::MaxIter;
    return at;
}

}  // namespace

PowerIterationResult model_power_iteration(const ComplexMatrix& M, const BlockStructure& structure,
                                           const PowerIterationOptions& options) {
    if (M.rows() != M.cols()) throw DimensionError("matrix must be square");
    if (M.rows() != structure.n())
        throw DimensionError("matrix dimension " + std::to_string(M.rows()) + " does not match structure n = " +
                             std::to_string(structure.n()));
    if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (options.max_restarts < 0) throw std::invalid_argument("max_restarts must be >= 0");

    const double zero_level = options.tol * M.norm();
    // delta*I lies in every structure, so a fixed point below rho(M) is a
    // spurious local maximum; restart from it and keep it only as a fallback
    const double rho = spectral_radius(M);
    PowerIterationResult out;
    std::optional<PowerIterationResult> spurious;
    bool any_unconverged = false;
    double best = 0.0;

    for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
        Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(attempt)));
        Attempt at = run_attempt(M, structure, options, rng, zero_level);
        out.restarts = attempt;
        out.iterations = at.iterations;
        if (at.end == AttemptEnd::Converged) {
            PowerIterationResult hit = out;
            hit.status = PowerStatus::Converged;
            hit.mu = hit.mu_tilde = at.mu_tilde;
            hit.mu_bar = at.mu_bar;
            hit.a = std::move(at.a);
            hit.b = std::move(at.b);
            hit.w = std::move(at.w);
            hit.z = std::move(at.z);
            if (hit.mu_tilde >= rho - options.tol) return hit;
            if (!spurious || hit.mu_tilde > spurious->mu_tilde) spurious = std::move(hit);
            continue;
        }
        if (at.end == AttemptEnd::MaxIter) {
            if (!any_unconverged || at.best > best) {
                best = at.best;
                out.mu_tilde = at.mu_tilde;
                out.mu_bar = at.mu_bar;
                out.a = at.a;
                out.b = at.b;
                out.w = at.w;
                out.z = at.z;
            }
            any_unconverged = true;
        }
    }

    if (spurious) {
        spurious->restarts = out.restarts;
        return *spurious;
    }
    if (any_unconverged) {
        out.status = PowerStatus::NotConverged;
        out.mu = best;
    } else {
        // No Delta in the structure makes I + M Delta singular along any
        // direction the iteration could find.
        out.status = PowerStatus::ZeroGain;
        out.mu = out.mu_tilde = out.mu_bar = 0.0;
    }
    return out;
}

GridMuResult model_mu_over_grid(const StateSpaceModel& model, const BlockStructure& structure, Index N,
                                const PowerIterationOptions& options, std::size_t threads) {
    if (N < 2) throw std::invalid_argument("grid needs N >= 2");
    if (model.n() != structure.n())
        throw DimensionError("plant has " + std::to_string(model.n()) + " channels, structure n = " +
                             std::to_string(structure.n()));
    GridMuResult out;
    out.bins.resize(static_cast<std::size_t>(N));
    out.mu_curve.resize(static_cast<std::size_t>(N));
    parallel_for(
        static_cast<std::size_t>(N),
        [&](std::size_t m) {
            const double omega = kTwoPi * static_cast<double>(m) / static_cast<double>(N);
            PowerIterationOptions opt = options;
            opt.seed = derive_seed(options.seed, m);
            out.bins[m] = model_power_iteration(freq_response(model, omega), structure, opt);
            out.mu_curve[m] = out.bins[m].mu;
        },
        threads);

    auto value = [&](Index m) { return out.mu_curve[static_cast<std::size_t>(m)]; };
    out.peak_bin = tied_argmax(N, value, [&](Index m) { return out.bins[static_cast<std::size_t>(m)].converged(); });
    out.peak_converged = out.peak_bin >= 0;
    if (out.peak_bin < 0) out.peak_bin = tied_argmax(N, value, [](Index) { return true; });
    out.peak = value(out.peak_bin);
    return out;
}

}  // namespace muprobe
