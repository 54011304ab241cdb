#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nmkdv {

using cx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cx I{0.0, 1.0};

/// Raised when an argument lies outside the domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Raised when an iterative method fails to converge.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for requests outside the regions the toolkit covers.
struct OutOfScope : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Mat2 pauli1() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat2 pauli2() {
    Mat2 m;
    m << 0.0, -I, I, 0.0;
    return m;
}

inline Mat2 pauli3() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline double rel_err(cx a, cx b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace nmkdv
