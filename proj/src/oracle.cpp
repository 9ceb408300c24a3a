#include "muprobe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "muprobe/power.hpp"

namespace muprobe {

double max_singular_value(const ComplexMatrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(M);
    return svd.singularValues()(0);
}

double spectral_radius(const ComplexMatrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double exact_single_full(const ComplexMatrix& M) { return max_singular_value(M); }

double exact_single_repeated_scalar(const ComplexMatrix& M) { return spectral_radius(M); }

ComplexMatrix random_structured_unitary(const BlockStructure& structure, Rng& rng) {
    ComplexMatrix Q = ComplexMatrix::Zero(structure.n(), structure.n());
    for (const Block& blk : structure.blocks()) {
        if (blk.kind == BlockKind::RepeatedScalar)
            Q.block(blk.offset, blk.offset, blk.size, blk.size).diagonal().setConstant(random_phase(rng));
        else
            Q.block(blk.offset, blk.offset, blk.size, blk.size) = haar_unitary(rng, blk.size);
    }
    return Q;
}

double random_search_lower_bound(const ComplexMatrix& M, const BlockStructure& structure, std::size_t samples,
                                 std::uint64_t seed) {
    if (M.rows() != M.cols() || M.rows() != structure.n())
        throw DimensionError("matrix dimension does not match structure");

    Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
    double best = es.eigenvalues().cwiseAbs().maxCoeff();

    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        const ComplexMatrix Q = random_structured_unitary(structure, rng);
        es.compute(Q * M, false);
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return best;
}

namespace {

// Maps the free log-scalings onto the per-coordinate log-diagonal of D.
struct ScalingLayout {
    std::vector<Index> var_of_coord;
    Index vars = 0;

    explicit ScalingLayout(const BlockStructure& s) : var_of_coord(static_cast<std::size_t>(s.n())) {
        for (const Block& blk : s.blocks()) {
            for (Index i = 0; i < blk.size; ++i) {
                var_of_coord[static_cast<std::size_t>(blk.offset + i)] = vars;
                if (blk.kind == BlockKind::RepeatedScalar) ++vars;
            }
            if (blk.kind == BlockKind::Full) ++vars;
        }
    }
};

double scaled_norm(const ComplexMatrix& M, const ScalingLayout& layout, const std::vector<double>& x) {
    const Index n = M.rows();
    ComplexMatrix S(n, n);
    for (Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(layout.var_of_coord[static_cast<std::size_t>(i)])];
        for (Index j = 0; j < n; ++j) {
            const double xj = x[static_cast<std::size_t>(layout.var_of_coord[static_cast<std::size_t>(j)])];
            S(i, j) = M(i, j) * std::exp(xi - xj);
        }
    }
    // sqrt(lambda_max(S^H S)) is accurate to eps * sigma_max and much cheaper than an SVD.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(S.adjoint() * S, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues()(n - 1), 0.0));
}

// Line search on one coordinate: expand a bracket in the descending
// direction, then golden-section inside it.
double line_minimize(const std::function<double(double)>& f, double x0, double f0, double& f_out) {
    constexpr double kGolden = 0.6180339887498949;
    double step = 0.25;
    double fp = f(x0 + step), fm = f(x0 - step);
    if (fp >= f0 && fm >= f0) {
        // Minimum within [x0 - step, x0 + step].
    } else {
        const double dir = (fp < fm) ? 1.0 : -1.0;
        double prev = x0, cur = x0 + dir * step, fcur = std::min(fp, fm);
        for (int k = 0; k < 40; ++k) {
            step *= 2.0;
            const double next = cur + dir * step;
            const double fnext = f(next);
            if (fnext >= fcur) {
                x0 = cur;
                step = std::abs(next - prev) / 2.0;
                f0 = fcur;
                break;
            }
            prev = cur;
            cur = next;
            fcur = fnext;
            x0 = cur;
            f0 = fcur;
        }
    }
    double a = x0 - step, b = x0 + step;
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < 80 && (b - a) > 1e-9; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    double xbest = x0, fbest = f0;
    if (fc < fbest) xbest = c, fbest = fc;
    if (fd < fbest) xbest = d, fbest = fd;
    f_out = fbest;
    return xbest;
}

}  // namespace

double diag_scaling_upper_bound(const ComplexMatrix& M, const BlockStructure& structure, int iters) {
    if (M.rows() != M.cols() || M.rows() != structure.n())
        throw DimensionError("matrix dimension does not match structure");
    if (iters < 0) throw std::invalid_argument("iters must be >= 0");

    const ScalingLayout layout(structure);
    std::vector<double> x(static_cast<std::size_t>(layout.vars), 0.0);
    double best = scaled_norm(M, layout, x);
    if (layout.vars < 2) return best;  // D is a multiple of I

    for (int sweep = 0; sweep < iters; ++sweep) {
        const double start = best;
        // The last variable is pinned: only ratios of scalings matter.
        for (Index v = 0; v + 1 < layout.vars; ++v) {
            const auto vi = static_cast<std::size_t>(v);
            const double x0 = x[vi];
            auto f = [&](double t) {
                x[vi] = t;
                return scaled_norm(M, layout, x);
            };
            double f_new = best;
            const double t = line_minimize(f, x0, best, f_new);
            if (f_new < best) {
                x[vi] = t;
                best = f_new;
            } else {
                x[vi] = x0;
            }
        }
        if (start - best <= 1e-13 * start) break;
    }
    return best;
}

HinfPeak hinf_grid_peak(const StateSpaceModel& model, Index grid_size) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    HinfPeak peak;
    for (Index m = 0; m < grid_size; ++m) {
        const double omega = kTwoPi * static_cast<double>(m) / static_cast<double>(grid_size);
        const double s = max_singular_value(freq_response(model, omega));
        if (m == 0 || s > peak.value) peak = {s, m, omega};
    }
    return peak;
}

double hinf_grid(const StateSpaceModel& model, Index grid_size) { return hinf_grid_peak(model, grid_size).value; }

BoundsReport bounds(const ComplexMatrix& M, const BlockStructure& structure, const BoundsOptions& options) {
    BoundsReport rep;
    const bool single = structure.blocks().size() == 1;
    if (single && structure.num_full() == 1) {
        rep.lower = rep.upper = exact_single_full(M);
        rep.lower_method = rep.upper_method = "exact_single_full";
        return rep;
    }
    rep.upper = diag_scaling_upper_bound(M, structure, options.iters);
    rep.upper_method = "diag_scaling";
    if (single) {
        rep.lower = exact_single_repeated_scalar(M);
        rep.lower_method = "exact_single_repeated_scalar";
        return rep;
    }
    rep.lower = random_search_lower_bound(M, structure, options.samples, options.seed);
    rep.lower_method = "random_search";
    PowerIterationOptions popt;
    popt.seed = options.seed;
    const auto pw = model_power_iteration(M, structure, popt);
    if (pw.converged() && pw.mu > rep.lower) {
        rep.lower = pw.mu;
        rep.lower_method = "power_iteration";
    }
    return rep;
}

nlohmann::json to_json(const BoundsReport& report) {
    return {{"lower", report.lower},
            {"upper", report.upper},
            {"lower_method", report.lower_method},
            {"upper_method", report.upper_method}};
}

}  // namespace muprobe
