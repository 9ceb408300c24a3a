#pragma once

#include <algorithm>
#include <cmath>

#include "muprobe/lti.hpp"
#include "muprobe/types.hpp"

namespace muprobe::testing {

// x+ = a x + u, y = c x
inline StateSpaceModel scalar_model(double a, double c, double d = 0.0) {
    RealMatrix A(1, 1), B(1, 1), C(1, 1), D(1, 1);
    A << a;
    B << 1.0;
    C << c;
    D << d;
    return StateSpaceModel(A, B, C, D);
}

// 0.5 q^-1
inline StateSpaceModel half_delay() { return scalar_model(0.0, 0.5); }

// 1 / (q - 0.9)
inline StateSpaceModel slow_pole() { return scalar_model(0.9, 1.0); }

inline StateSpaceModel diag_plant() {
    RealMatrix A = RealMatrix::Zero(2, 2), B = RealMatrix::Identity(2, 2), C = RealMatrix::Zero(2, 2);
    A(1, 1) = 0.9;
    C(0, 0) = 0.5;
    C(1, 1) = 1.0;
    return StateSpaceModel(A, B, C, RealMatrix::Zero(2, 2));
}

// Fixed 2x2 plant with reference values computed independently in numpy.
inline StateSpaceModel fixed_plant() {
    RealMatrix A(2, 2), B(2, 2), C(2, 2);
    A << 0.5, 0.2, -0.1, 0.3;
    B << 1.0, 0.0, 0.5, 1.0;
    C << 1.0, -1.0, 0.2, 0.7;
    return StateSpaceModel(A, B, C, RealMatrix::Zero(2, 2));
}

// Fixed 3x3 complex matrix used for frozen bound values.
inline ComplexMatrix fixed_matrix() {
    using namespace std::complex_literals;
    ComplexMatrix M(3, 3);
    M << 1.0 + 2.0i, 0.5, -1.0i,
         0.3 - 0.2i, -1.0, 2.0,
         1.0, 1.0i, 0.5 + 0.5i;
    return M;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class X, class Y>
double rel_diff(const X& a, const Y& b) {
    const double s = std::max(b.norm(), 1e-300);
    return (a - b).norm() / s;
}

}  // namespace muprobe::testing
