#pragma once

#include "nmkdv/types.hpp"

#include <array>
#include <cmath>

namespace nmkdv {

namespace detail {
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// log Gamma on the principal branch continued from the positive real axis, Re z >= 1/2.
inline cx lgamma_right(cx z) {
    z -= 1.0;
    cx x = detail::kLanczosCoef[0];
    for (std::size_t i = 1; i < detail::kLanczosCoef.size(); ++i)
        x += detail::kLanczosCoef[i] / (z + static_cast<double>(i));
    const cx t = z + detail::kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

/// Complex Gamma by the Lanczos approximation with reflection for Re z < 1/2.
inline cx cgamma(cx z) {
    if (z.real() < 0.5) {
        if (z.imag() == 0.0 && z.real() == std::floor(z.real())) throw DomainError("cgamma: pole");
        const cx s = std::sin(pi * z);
        return pi / (s * std::exp(lgamma_right(1.0 - z)));
    }
    return std::exp(lgamma_right(z));
}

/// 1/Gamma(z), entire; exact zeros at the non-positive integers.
inline cx rgamma(cx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) return 0.0;
    if (z.real() < 0.5) return std::sin(pi * z) * std::exp(lgamma_right(1.0 - z)) / pi;
    return std::exp(-lgamma_right(z));
}

}  // namespace nmkdv
