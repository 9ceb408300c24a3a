#include <doctest.h>

#include <Eigen/QR>

#include "muprobe/blocks.hpp"
#include "muprobe/random.hpp"

using namespace muprobe;
using namespace std::complex_literals;

namespace {

ComplexVector vec(std::initializer_list<Complex> v) {
    ComplexVector out(static_cast<Index>(v.size()));
    Index i = 0;
    for (Complex c : v) out(i++) = c;
    return out;
}

bool near(const ComplexVector& a, const ComplexVector& b, double tol = 1e-14) {
    return (a - b).norm() <= tol * std::max(1.0, b.norm());
}

// Unitary mapping unit vector x onto unit vector y.
ComplexMatrix unitary_between(const ComplexVector& x, const ComplexVector& y, Rng& rng) {
    auto frame = [&](const ComplexVector& v) {
        ComplexMatrix X = complex_gaussian_matrix(rng, v.size(), v.size());
        X.col(0) = v;
        ComplexMatrix U = Eigen::HouseholderQR<ComplexMatrix>(X).householderQ();
        U.col(0) *= U.col(0).dot(v);  // undo the phase QR put on the first column
        return U;
    };
    return frame(y) * frame(x).adjoint();
}

// Hermitian positive definite D with D x = y, given x^H y > 0.
ComplexMatrix hermitian_between(const ComplexVector& x, const ComplexVector& y) {
    const Index r = x.size();
    const Complex c = x.dot(y);
    const ComplexMatrix proj = ComplexMatrix::Identity(r, r) - x * x.adjoint() / x.squaredNorm();
    return y * y.adjoint() / c.real() + proj;
}

}  // namespace

TEST_CASE("BlockStructure: r/m notation") {
    const BlockStructure s = BlockStructure::from_rm({2, 1, 2}, {1, 3});
    CHECK(s.n() == 6);
    CHECK(s.num_scalar() == 2);
    CHECK(s.num_full() == 1);
    CHECK(s.r_notation() == std::vector<long long>{2, 1, 2});
    CHECK(s.m_notation() == std::vector<long long>{1, 3});
    CHECK(s.blocks()[2].offset == 3);
    CHECK(s.blocks()[2].kind == BlockKind::Full);

    const BlockStructure f = BlockStructure::from_rm({0, 0}, {1, 3});
    CHECK(f == BlockStructure::single_full(3));
    CHECK(f.r_notation() == std::vector<long long>{0, 0});

    CHECK_THROWS_AS(BlockStructure::from_rm({0, 0}, {0, 0}), ConfigError);
    CHECK_THROWS_AS(BlockStructure::from_rm({2, 1}, {0}), ConfigError);
    CHECK_THROWS_AS(BlockStructure::from_rm({1, 0}, {0}), ConfigError);
    CHECK_THROWS_AS(BlockStructure::from_rm({-1}, {1, 2}), ConfigError);
}

TEST_CASE("BlockStructure: JSON") {
    const BlockStructure s({1, 1}, {2});
    CHECK(structure_from_json(to_json(s)) == s);
    CHECK(structure_from_json(nlohmann::json::parse(R"({"r":[0,0],"m":[1,3]})")) == BlockStructure::single_full(3));
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(R"({"r":[0],"m":[1,3],"q":1})")), ConfigError);
    CHECK_THROWS_AS(structure_from_json(nlohmann::json::parse(R"({"r":[0],"m":[1,1.5]})")), ConfigError);
}

TEST_CASE("update_z: examples") {
    const BlockStructure scalar1 = BlockStructure::single_repeated_scalar(1);
    CHECK(near(update_z(scalar1, vec({2.0}), vec({3.0})), vec({2.0})));
    CHECK(near(update_z(scalar1, vec({1.0}), vec({1.0i})), vec({1.0i})));
    const BlockStructure full2 = BlockStructure::single_full(2);
    CHECK(near(update_z(full2, vec({3.0, 4.0}), vec({1.0, 0.0})), vec({5.0, 0.0})));
}

TEST_CASE("update_b: examples") {
    const BlockStructure scalar1 = BlockStructure::single_repeated_scalar(1);
    CHECK(near(update_b(scalar1, vec({1.0}), vec({-1.0})), vec({-1.0})));
    CHECK(near(update_b(scalar1, vec({1.0 + 1.0i}), vec({1.0 + 1.0i})), vec({1.0 + 1.0i})));
    const BlockStructure full2 = BlockStructure::single_full(2);
    CHECK(near(update_b(full2, vec({0.0, 2.0}), vec({1.0, 1.0})), vec({std::sqrt(2.0), std::sqrt(2.0)})));
}

TEST_CASE("degeneracy_check: examples") {
    const BlockStructure scalar2 = BlockStructure::single_repeated_scalar(2);
    CHECK(degeneracy_check(scalar2, vec({1.0, 0.0}), vec({0.0, 1.0})) == std::vector<std::size_t>{0});
    CHECK(degeneracy_check(BlockStructure::single_repeated_scalar(1), vec({1.0}), vec({1.0})).empty());
    CHECK(degeneracy_check(BlockStructure::single_full(2), vec({1.0, 1.0}), vec({0.0, 0.0})) ==
          std::vector<std::size_t>{0});

    const BlockStructure mixed({1}, {2});
    CHECK(degeneracy_check(mixed, vec({1.0, 0.0, 0.0}), vec({1.0, 1.0, 0.0})) == std::vector<std::size_t>{1});
    CHECK_THROWS_AS(update_z(scalar2, vec({1.0, 0.0}), vec({0.0, 1.0})), DegenerateBlockError);
    CHECK_THROWS_AS(update_b(BlockStructure::single_full(2), vec({1.0, 1.0}), vec({0.0, 0.0})),
                    DegenerateBlockError);
    CHECK_THROWS_AS(update_z(mixed, vec({1.0, 0.0}), vec({1.0, 0.0})), DimensionError);
}

TEST_CASE("updates preserve block norms and are idempotent") {
    Rng rng(12);
    const BlockStructure s({2, 1}, {3, 1});
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexVector w = complex_gaussian_vector(rng, s.n());
        const ComplexVector a = complex_gaussian_vector(rng, s.n());
        const ComplexVector z = update_z(s, w, a);
        const ComplexVector b = update_b(s, a, w);
        for (const Block& blk : s.blocks()) {
            CHECK(z.segment(blk.offset, blk.size).norm() ==
                  doctest::Approx(w.segment(blk.offset, blk.size).norm()).epsilon(1e-13));
            CHECK(b.segment(blk.offset, blk.size).norm() ==
                  doctest::Approx(a.segment(blk.offset, blk.size).norm()).epsilon(1e-13));
        }
        CHECK(near(update_z(s, w, z), z, 1e-13));
        CHECK(near(update_b(s, b, w), b, 1e-13));
    }
}

TEST_CASE("update round trip: structured Q and D reproduce the updates") {
    Rng rng(99);
    const std::vector<BlockStructure> shapes{
        BlockStructure({3}, {}), BlockStructure({}, {3}), BlockStructure({1, 2}, {2}), BlockStructure({2}, {1, 3}),
    };
    for (const BlockStructure& s : shapes) {
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexVector a = complex_gaussian_vector(rng, s.n());
            const ComplexVector w = complex_gaussian_vector(rng, s.n());
            const ComplexVector z = update_z(s, w, a);
            const ComplexVector b = update_b(s, a, w);

            ComplexMatrix Q = ComplexMatrix::Zero(s.n(), s.n());
            ComplexMatrix D = ComplexMatrix::Zero(s.n(), s.n());
            for (const Block& blk : s.blocks()) {
                const ComplexVector ak = a.segment(blk.offset, blk.size);
                const ComplexVector wk = w.segment(blk.offset, blk.size);
                auto q = Q.block(blk.offset, blk.offset, blk.size, blk.size);
                auto d = D.block(blk.offset, blk.offset, blk.size, blk.size);
                if (blk.kind == BlockKind::RepeatedScalar) {
                    const Complex ph = ak.dot(wk) / std::abs(ak.dot(wk));
                    q = ph * ComplexMatrix::Identity(blk.size, blk.size);
                    d = hermitian_between(ak, std::conj(ph) * wk);
                } else {
                    q = unitary_between(ak.normalized(), wk.normalized(), rng);
                    d = (wk.norm() / ak.norm()) * ComplexMatrix::Identity(blk.size, blk.size);
                }
            }
            CHECK((Q.adjoint() * Q - ComplexMatrix::Identity(s.n(), s.n())).norm() < 1e-12);
            CHECK((D - D.adjoint()).norm() < 1e-12);
            CHECK(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(D).eigenvalues().minCoeff() > 0.0);
            CHECK(near(Q * a, b, 1e-10));
            CHECK(near(D * a, z, 1e-10));
            CHECK(near(D.inverse() * w, b, 1e-10));
            CHECK(near(Q.adjoint() * w, z, 1e-10));
        }
    }
}

TEST_CASE("structure label") {
    CHECK(BlockStructure({1, 1}, {1, 1}).label() == "r=[2,1,1] m=[2,1,1]");
    CHECK(BlockStructure::single_full(3).label() == "r=[0,0] m=[1,3]");
}
