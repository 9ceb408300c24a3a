#include "muprobe/lti.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "muprobe/random.hpp"

namespace muprobe {

namespace {

std::string shape(const RealMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

// Row-major copies so the inner simulation loop walks contiguous memory.
struct DenseRows {
    Index rows = 0, cols = 0;
    std::vector<double> v;

    explicit DenseRows(const RealMatrix& m) : rows(m.rows()), cols(m.cols()), v(m.size()) {
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) v[i * cols + j] = m(i, j);
    }
    const double* row(Index i) const { return v.data() + i * cols; }
};

class Simulator {
public:
    explicit Simulator(const StateSpaceModel& model)
        : a_(model.A()), b_(model.B()), c_(model.C()), d_(model.D()),
          n_(model.n()), nx_(model.n_x()), has_d_(!model.strictly_proper()),
          x_(nx_, 0.0), next_(nx_, 0.0) {}

    // Advances one sample; writes y_k = C x_k + D u_k into y when non-null.
    void step(const double* u, double* y) {
        if (y != nullptr) {
            for (Index i = 0; i < n_; ++i) {
                const double* ci = c_.row(i);
                double acc = 0.0;
                for (Index k = 0; k < nx_; ++k) acc += ci[k] * x_[k];
                if (has_d_) {
                    const double* di = d_.row(i);
                    for (Index k = 0; k < n_; ++k) acc += di[k] * u[k];
                }
                y[i] = acc;
            }
        }
        for (Index i = 0; i < nx_; ++i) {
            const double* ai = a_.row(i);
            const double* bi = b_.row(i);
            double acc = 0.0;
            for (Index k = 0; k < nx_; ++k) acc += ai[k] * x_[k];
            for (Index k = 0; k < n_; ++k) acc += bi[k] * u[k];
            next_[i] = acc;
        }
        x_.swap(next_);
    }

private:
    DenseRows a_, b_, c_, d_;
    Index n_, nx_;
    bool has_d_;
    std::vector<double> x_, next_;
};

void add_noise(RealMatrix& y, const NoiseSpec& noise) {
    if (!noise.active()) return;
    Rng rng(noise.seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(noise.variance));
    for (Index t = 0; t < y.rows(); ++t)
        for (Index c = 0; c < y.cols(); ++c) y(t, c) += normal(rng);
}

void check_input(const StateSpaceModel& model, const RealMatrix& input) {
    if (input.cols() != model.n())
        throw DimensionError("input has " + std::to_string(input.cols()) +
                             " channels, model expects " + std::to_string(model.n()));
    if (input.rows() < 1) throw DimensionError("input must contain at least one sample");
}

}  // namespace

double spectral_radius(const RealMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<RealMatrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

StateSpaceModel::StateSpaceModel(RealMatrix A, RealMatrix B, RealMatrix C, RealMatrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
    const Index nx = A_.rows();
    if (nx < 1 || A_.cols() != nx) throw DimensionError("A must be square and non-empty, got " + shape(A_));
    const Index n = B_.cols();
    if (n < 1) throw DimensionError("B must have at least one column");
    if (B_.rows() != nx) throw DimensionError("B must have " + std::to_string(nx) + " rows, got " + shape(B_));
    if (C_.rows() != n || C_.cols() != nx)
        throw DimensionError("C must be " + std::to_string(n) + "x" + std::to_string(nx) + ", got " + shape(C_));
    if (D_.rows() != n || D_.cols() != n)
        throw DimensionError("D must be " + std::to_string(n) + "x" + std::to_string(n) + ", got " + shape(D_));
    if (!A_.allFinite() || !B_.allFinite() || !C_.allFinite() || !D_.allFinite())
        throw ConfigError("state-space matrices must be finite");
    spectral_radius_ = muprobe::spectral_radius(A_);
    if (!(spectral_radius_ < 1.0))
        throw ConfigError("model is not stable: spectral radius of A is " + std::to_string(spectral_radius_));
}

RealMatrix simulate(const StateSpaceModel& model, const RealMatrix& input, const NoiseSpec& noise) {
    check_input(model, input);
    const Index T = input.rows();
    const Index n = model.n();
    // Row-major buffers so each sample is contiguous.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u = input;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y(T, n);
    Simulator sim(model);
    for (Index t = 0; t < T; ++t) sim.step(u.row(t).data(), y.row(t).data());
    RealMatrix out = y;
    add_noise(out, noise);
    return out;
}

RealMatrix simulate_periodic(const StateSpaceModel& model, const RealMatrix& period, int warm_periods,
                             const NoiseSpec& noise) {
    check_input(model, period);
    if (warm_periods < 0) throw std::invalid_argument("warm_periods must be non-negative");
    const Index N = period.rows();
    const Index n = model.n();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u = period;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y(N, n);
    Simulator sim(model);
    for (int p = 0; p < warm_periods; ++p)
        for (Index t = 0; t < N; ++t) sim.step(u.row(t).data(), nullptr);
    for (Index t = 0; t < N; ++t) sim.step(u.row(t).data(), y.row(t).data());
    RealMatrix out = y;
    add_noise(out, noise);
    return out;
}

ComplexMatrix freq_response(const StateSpaceModel& model, double omega) {
    ComplexMatrix resolvent = -model.A().cast<Complex>();
    resolvent.diagonal().array() += std::polar(1.0, omega);
    Eigen::FullPivLU<ComplexMatrix> lu(resolvent);
    if (!lu.isInvertible())
        throw InternalError("singular resolvent at omega = " + std::to_string(omega));
    const ComplexMatrix x = lu.solve(model.B().cast<Complex>());
    return model.D().cast<Complex>() + model.C().cast<Complex>() * x;
}

StateSpaceModel transpose_model(const StateSpaceModel& model) {
    return StateSpaceModel(model.A().transpose(), model.C().transpose(), model.B().transpose(),
                           model.D().transpose());
}

StateSpaceModel random_stable(Index n, Index n_x, double pole_radius_max, std::uint64_t seed) {
    if (n < 1 || n_x < 1) throw DimensionError("random_stable needs n >= 1 and n_x >= 1");
    if (!(pole_radius_max > 0.0 && pole_radius_max < 1.0))
        throw std::invalid_argument("pole_radius_max must lie in (0, 1)");
    Rng rng(seed);
    const double lo = std::min(0.3, pole_radius_max);
    std::uniform_real_distribution<double> radius(lo, pole_radius_max);
    const double rho = radius(rng);
    RealMatrix A = rho * haar_orthogonal(rng, n_x);
    RealMatrix B = gaussian_matrix(rng, n_x, n);
    RealMatrix C = gaussian_matrix(rng, n, n_x);
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), RealMatrix::Zero(n, n));
}

namespace {

nlohmann::json matrix_to_json(const RealMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix matrix_from_json(const nlohmann::json& j, const char* name) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string("matrix ") + name + " must be a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ConfigError(std::string("matrix ") + name + " must have non-empty numeric rows");
    RealMatrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols)
            throw ConfigError(std::string("matrix ") + name + " has ragged rows");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!row[k].is_number()) throw ConfigError(std::string("matrix ") + name + " has a non-numeric entry");
            m(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
        }
    }
    return m;
}

}  // namespace

nlohmann::json to_json(const StateSpaceModel& model) {
    return {{"A", matrix_to_json(model.A())},
            {"B", matrix_to_json(model.B())},
            {"C", matrix_to_json(model.C())},
            {"D", matrix_to_json(model.D())}};
}

StateSpaceModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("plant must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "A" && key != "B" && key != "C" && key != "D")
            throw ConfigError("unknown plant key '" + key + "'");
    for (const char* key : {"A", "B", "C"})
        if (!j.contains(key)) throw ConfigError(std::string("plant is missing matrix ") + key);
    RealMatrix A = matrix_from_json(j.at("A"), "A");
    RealMatrix B = matrix_from_json(j.at("B"), "B");
    RealMatrix C = matrix_from_json(j.at("C"), "C");
    RealMatrix D = j.contains("D") ? matrix_from_json(j.at("D"), "D") : RealMatrix::Zero(C.rows(), B.cols());
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(D));
}

}  // namespace muprobe
