#pragma once

#include "nmkdv/contour.hpp"
#include "nmkdv/spectral_core.hpp"
#include "nmkdv/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <string>
#include <vector>

namespace nmkdv {

/// Phase t*theta(z) = lambda(z) (x + (4k^2 - 2) t), valid for any (x, t) including t = 0.
inline cx phase_t_theta(cx z, double x, double t) {
    const Uniformization u = uniformize(z);
    return u.lambda * (x + (4.0 * u.k * u.k - 2.0) * t);
}

/// Simple pole of a rational RH solution: Res_{z} m.col(column) = coupling * m.col(1 - column)(z).
struct ResiduePole {
    cx z;
    int column = 0;
    cx coupling;
};

/// m(z) = I + (i kappa / z) sigma1 + sum_p r_p e_{col(p)}^T / (z - z_p).
struct RationalSolution {
    double kappa = 1.0;
    std::vector<ResiduePole> poles;
    std::vector<Vec2> residues;
    double rcond = 1.0;

    Mat2 eval(cx z) const {
        Mat2 m = Mat2::Identity() + (I * kappa / z) * pauli1();
        for (std::size_t p = 0; p < poles.size(); ++p)
            m.col(poles[p].column) += residues[p] / (z - poles[p].z);
        return m;
    }

    /// Coefficient m1 of m = I + m1/z + O(z^-2) at infinity.
    Mat2 m1() const {
        Mat2 m = I * kappa * pauli1();
        for (std::size_t p = 0; p < poles.size(); ++p) m.col(poles[p].column) += residues[p];
        return m;
    }

    cx q() const { return -I * m1()(0, 1); }
    /// sigma q(-x, -t) read from the lower-left entry.
    cx q_mirror_sigma() const { return I * m1()(1, 0); }
};

inline RationalSolution solve_rational(std::vector<ResiduePole> poles, double kappa) {
    RationalSolution sol;
    sol.kappa = kappa;
    sol.poles = std::move(poles);
    const std::size_t n = sol.poles.size();
    sol.residues.assign(n, Vec2::Zero());
    if (n == 0) return sol;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::MatrixXcd rhs(static_cast<Eigen::Index>(n), 2);
    for (std::size_t p = 0; p < n; ++p) {
        const ResiduePole& pp = sol.poles[p];
        const int other = 1 - pp.column;
        // background part of the other column: (1, i kappa/z) for column 0, (i kappa/z, 1) for column 1
        Vec2 base = other == 0 ? Vec2(1.0, I * kappa / pp.z) : Vec2(I * kappa / pp.z, 1.0);
        // rows scaled by 1/max(1, |c_p|) so that large couplings do not masquerade as singularity
        const double sc = 1.0 / std::max(1.0, std::abs(pp.coupling));
        const auto ip = static_cast<Eigen::Index>(p);
        M(ip, ip) = sc;
        rhs.row(ip) = (sc * pp.coupling * base).transpose();
        for (std::size_t q = 0; q < n; ++q) {
            if (sol.poles[q].column != other) continue;
            M(ip, static_cast<Eigen::Index>(q)) -= sc * pp.coupling / (pp.z - sol.poles[q].z);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    sol.rcond = lu.rcond();
    if (!(sol.rcond > 1e-14))
        throw ConvergenceError("rational RH solve: singular residue system, condition number ~ " +
                               std::to_string(1.0 / sol.rcond));
    const Eigen::MatrixXcd X = lu.solve(rhs);
    for (std::size_t p = 0; p < n; ++p) sol.residues[p] = X.row(static_cast<Eigen::Index>(p)).transpose();
    return sol;
}

struct SeedPole {
    cx eta;  // in D+
    cx A;    // norming constant A[eta]
};

struct SolitonSeed {
    int sigma = -1;
    double q_minus = 1.0;
    std::vector<SeedPole> poles;
};

/// Reflectionless s11(z) = prod (z - eta) / (z - eta_hat).
inline cx reflectionless_s11(const std::vector<cx>& etas, cx z) {
    cx f = 1.0;
    for (cx e : etas) f *= (z - e) / (z + 1.0 / e);
    return f;
}

inline cx reflectionless_ds11(const std::vector<cx>& etas, std::size_t j) {
    const cx e0 = etas[j];
    cx f = 1.0 / (e0 + 1.0 / e0);
    for (std::size_t i = 0; i < etas.size(); ++i)
        if (i != j) f *= (e0 - etas[i]) / (e0 + 1.0 / etas[i]);
    return f;
}

/// Seed with A = b / s11'(eta). Reflectionless data must satisfy s11(0) = -sigma.
inline SolitonSeed reflectionless_seed(int sigma, double q_minus, const std::vector<cx>& etas,
                                       const std::vector<double>& b) {
    if (etas.size() != b.size()) throw DomainError("reflectionless_seed: one b per pole");
    cx prod = 1.0;
    for (cx e : etas) prod *= -e * e;
    if (std::abs(prod + static_cast<double>(sigma)) > 1e-10)
        throw DomainError("reflectionless_seed: pole set gives s11(0) = " + std::to_string(prod.real()) +
                          (prod.imag() != 0.0 ? ("+" + std::to_string(prod.imag()) + "i") : "") +
                          ", expected -sigma");
    SolitonSeed s{sigma, q_minus, {}};
    for (std::size_t j = 0; j < etas.size(); ++j) s.poles.push_back({etas[j], b[j] / reflectionless_ds11(etas, j)});
    return s;
}

/// Imaginary pole i omega in D+ that balances s11(0) = -sigma for the given off-axis pairs.
inline cx imaginary_compensator(const std::vector<cx>& etas) {
    double mod = 1.0;
    for (cx e : etas) mod *= std::norm(e);
    const double omega = 1.0 / std::sqrt(mod);
    // pick the root in D+: |omega| < 1 lies below the axis, |omega| > 1 above it
    return omega < 1.0 ? cx(0.0, -omega) : cx(0.0, omega);
}

inline std::vector<ResiduePole> soliton_poles(const SolitonSeed& seed, double x, double t) {
    std::vector<ResiduePole> out;
    for (const SeedPole& p : seed.poles) {
        const cx eh = -1.0 / p.eta;
        out.push_back({p.eta, 0, p.A * std::exp(-2.0 * I * phase_t_theta(p.eta, x, t))});
        out.push_back({eh, 1, eh * eh * p.A * std::exp(2.0 * I * phase_t_theta(eh, x, t))});
    }
    return out;
}

struct SolitonValue {
    cx q;
    RationalSolution m;
    bool perturbed = false;
};

/// Full reflectionless solution at (x, t). Where the residue system is nearly singular (rcond < 1e-8,
/// typically a removable point of q) the value is extrapolated from x +- delta and x +- 2 delta.
inline SolitonValue soliton_solve(const SolitonSeed& seed, double x, double t, double delta = 1e-3) {
    try {
        RationalSolution m = solve_rational(soliton_poles(seed, x, t), seed.q_minus);
        if (m.rcond >= 1e-8) return {m.q(), m, false};
    } catch (const ConvergenceError&) {
    }
    auto at = [&](double dx) { return solve_rational(soliton_poles(seed, x + dx, t), seed.q_minus); };
    RationalSolution m1 = at(delta);
    const cx s1 = 0.5 * (m1.q() + at(-delta).q());
    const cx s2 = 0.5 * (at(2.0 * delta).q() + at(-2.0 * delta).q());
    return {(4.0 * s1 - s2) / 3.0, m1, true};
}

inline cx q_soliton(const SolitonSeed& seed, double x, double t) { return soliton_solve(seed, x, t).q; }

/// Residue data of the outer model for the poles kept in Lambda. T is the scalar transform;
/// in_delta[k] marks poles of the Delta set, where the residue moves to the other column.
struct OuterModelInput {
    const SolitonSeed* seed = nullptr;
    std::vector<std::size_t> lambda;
    std::vector<bool> in_delta;
    std::function<cx(cx)> T;
    double kappa = 1.0;
    double deriv_radius = 1e-4;
};

inline std::vector<ResiduePole> outer_model_poles(const OuterModelInput& in, double x, double t) {
    std::vector<ResiduePole> out;
    for (std::size_t k : in.lambda) {
        const SeedPole& p = in.seed->poles.at(k);
        const cx eh = -1.0 / p.eta;
        const cx Ah = eh * eh * p.A;
        const cx e_eta = std::exp(2.0 * I * phase_t_theta(p.eta, x, t));
        const cx e_hat = std::exp(2.0 * I * phase_t_theta(eh, x, t));
        if (!in.in_delta.at(k)) {
            const cx Te = in.T(p.eta), Th = in.T(eh);
            out.push_back({p.eta, 0, p.A / (Te * Te) / e_eta});
            out.push_back({eh, 1, Ah * Th * Th * e_hat});
        } else {
            const double r = in.deriv_radius * std::max(1e-3, std::abs(p.eta));
            const cx dinv = circle_derivative([&](cx z) { return 1.0 / in.T(z); }, p.eta, r);
            const cx dT = circle_derivative(in.T, eh, in.deriv_radius * std::max(1e-3, std::abs(eh)));
            out.push_back({p.eta, 1, e_eta / (p.A * dinv * dinv)});
            out.push_back({eh, 0, 1.0 / (Ah * dT * dT * e_hat)});
        }
    }
    return out;
}

inline RationalSolution solve_outer_model(const OuterModelInput& in, double x, double t) {
    try {
        return solve_rational(outer_model_poles(in, x, t), in.kappa);
    } catch (const ConvergenceError&) {
        return solve_rational(outer_model_poles(in, x + 1e-9, t), in.kappa);
    }
}

/// e^{-c t} envelope of the outer-model approximation.
inline double msol_error_bound(double t, double c) { return std::exp(-c * t); }

/// Decay rate c: the smallest |Re 2i theta| on the discs of radius varrho around poles outside Lambda.
inline double fit_msol_rate(const SolitonSeed& seed, const std::vector<std::size_t>& lambda, double xi,
                            double varrho, int samples = 64) {
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < seed.poles.size(); ++k) {
        if (std::find(lambda.begin(), lambda.end(), k) != lambda.end()) continue;
        for (cx centre : {seed.poles[k].eta, -1.0 / seed.poles[k].eta}) {
            for (int j = 0; j < samples; ++j) {
                const cx z = centre + varrho * std::polar(1.0, 2.0 * pi * j / samples);
                c = std::min(c, std::abs(re_2it_theta(z, xi, 1.0)));
            }
        }
    }
    return std::isfinite(c) ? c : 0.0;
}

/// sup over the disc boundaries of |A T^-2 e^{-2it theta}| / varrho for poles outside Lambda (or the
/// inverse combination for poles whose exponential grows), the size of the circle jumps.
inline double circle_jump_size(const SolitonSeed& seed, const std::vector<std::size_t>& lambda, double xi,
                               double t, double varrho, const std::function<cx(cx)>& T, int samples = 64) {
    double worst = 0.0;
    for (std::size_t k = 0; k < seed.poles.size(); ++k) {
        if (std::find(lambda.begin(), lambda.end(), k) != lambda.end()) continue;
        const cx eta = seed.poles[k].eta;
        const bool decaying = re_2it_theta(eta, xi, 1.0) > 0;  // e^{-2it theta} small at eta
        for (int j = 0; j < samples; ++j) {
            const cx z = eta + varrho * std::polar(1.0, 2.0 * pi * j / samples);
            const cx Tz = T(z);
            const cx e = std::exp(-2.0 * I * t * theta(z, xi));
            const cx v = decaying ? seed.poles[k].A * e / (Tz * Tz) : Tz * Tz / (seed.poles[k].A * e);
            worst = std::max(worst, std::abs(v) / varrho);
        }
    }
    return worst;
}

}  // namespace nmkdv
