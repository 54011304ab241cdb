#pragma once

#include "nmkdv/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace nmkdv {

using ComplexFn = std::function<cx(cx)>;

struct QuadratureOptions {
    double tol = 1e-11;
    double abs_tol = 1e-15;  // per-panel floor; tiny panels have estimates limited by round-off
    unsigned max_depth = 18;
    double near_factor = 0.25;  // subtraction kicks in when dist < near_factor * piece scale
};

/// Adaptive G7K15 bisection; a panel is accepted when its error estimate is below tol times its
/// L1 norm or below abs_tol.
inline cx integrate_gk(const std::function<cx(double)>& f, double a, double b,
                       const QuadratureOptions& opt, double* err = nullptr) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double e_total = 0.0;
    auto panel = [&](auto&& self, double lo, double hi, cx v, double e, double l1, unsigned depth) -> cx {
        if (e <= opt.tol * l1 || e <= opt.abs_tol || depth >= opt.max_depth || !(e == e)) {
            e_total += e;
            return v;
        }
        const double mid = 0.5 * (lo + hi);
        double el, er, ll, lr;
        const cx vl = GK::integrate(f, lo, mid, 0, 0.0, &el, &ll);
        const cx vr = GK::integrate(f, mid, hi, 0, 0.0, &er, &lr);
        return self(self, lo, mid, vl, el, ll, depth + 1) + self(self, mid, hi, vr, er, lr, depth + 1);
    };
    double e0, l0;
    const cx v0 = GK::integrate(f, a, b, 0, 0.0, &e0, &l0);
    const cx r = panel(panel, a, b, v0, e0, l0, 0);
    if (err) *err = e_total;
    return r;
}

/// An oriented smooth contour piece parametrized by u in [0, 1].
/// Line: a -> b. Ray: from anchor a to infinity along d (outward) or from infinity to a (inward).
/// Arc: c + r e^{i phi}, phi from phi_a to phi_b.
struct Piece {
    enum class Kind { Line, RayOut, RayIn, Arc };
    Kind kind = Kind::Line;
    cx a{}, b{};
    cx d{1.0};
    cx c{};
    double r = 1.0, phi_a = 0.0, phi_b = 0.0;

    static Piece line(cx a, cx b) { return {Kind::Line, a, b, {}, {}, 1.0, 0.0, 0.0}; }
    static Piece ray_out(cx a, cx d) { return {Kind::RayOut, a, {}, d, {}, 1.0, 0.0, 0.0}; }
    static Piece ray_in(cx a, cx d) { return {Kind::RayIn, a, {}, d, {}, 1.0, 0.0, 0.0}; }
    static Piece arc(cx c, double r, double pa, double pb) {
        return {Kind::Arc, {}, {}, {}, c, r, pa, pb};
    }

    cx s(double u) const {
        switch (kind) {
            case Kind::Line: return a + (b - a) * u;
            case Kind::RayOut: return a + d * (u / (1.0 - u));
            case Kind::RayIn: return a + d * ((1.0 - u) / u);
            default: return c + r * std::exp(I * (phi_a + (phi_b - phi_a) * u));
        }
    }

    cx ds(double u) const {
        switch (kind) {
            case Kind::Line: return b - a;
            case Kind::RayOut: return d / ((1.0 - u) * (1.0 - u));
            case Kind::RayIn: return -d / (u * u);
            default: {
                const double ph = phi_a + (phi_b - phi_a) * u;
                return I * (phi_b - phi_a) * r * std::exp(I * ph);
            }
        }
    }

    /// Parameter of the point nearest to z.
    double nearest(cx z) const {
        switch (kind) {
            case Kind::Line: {
                const cx e = b - a;
                const double u = std::real((z - a) * std::conj(e)) / std::norm(e);
                return std::clamp(u, 0.0, 1.0);
            }
            case Kind::RayOut:
            case Kind::RayIn: {
                const double p = std::max(0.0, std::real((z - a) * std::conj(d)) / std::norm(d));
                return kind == Kind::RayOut ? p / (1.0 + p) : 1.0 / (1.0 + p);
            }
            default: {
                double ang = std::arg(z - c);
                const double lo = std::min(phi_a, phi_b), hi = std::max(phi_a, phi_b);
                const double mid = 0.5 * (lo + hi);
                while (ang < mid - pi) ang += 2.0 * pi;
                while (ang > mid + pi) ang -= 2.0 * pi;
                ang = std::clamp(ang, lo, hi);
                return (ang - phi_a) / (phi_b - phi_a);
            }
        }
    }

    /// Length scale used to decide when z counts as near the piece.
    double scale(double u) const {
        switch (kind) {
            case Kind::Line: return std::abs(b - a);
            case Kind::Arc: return r * std::abs(phi_b - phi_a);
            default: return std::max(1.0, std::abs(s(std::clamp(u, 1e-6, 1.0 - 1e-6)) - a));
        }
    }
};

/// Cauchy-type integral of f(s)/(s - z) along a piece. When z is close to the piece the
/// pole part f(s*) / (u - c) is removed and integrated in closed form; the remainder is
/// integrated on intervals graded geometrically away from the nearest parameter.
inline cx cauchy_piece(const Piece& p, const ComplexFn& f, cx z, const QuadratureOptions& opt = {}) {
    const double us = p.nearest(z);
    const cx ss = p.s(us);
    const double dist = std::abs(ss - z);
    auto full = [&](double u) -> cx {
        const cx sv = p.s(u);
        return f(sv) * p.ds(u) / (sv - z);
    };
    if (dist > opt.near_factor * p.scale(us)) return integrate_gk(full, 0.0, 1.0, opt);

    const cx dss = p.ds(us);
    const cx fs = f(ss);
    const cx c = us - (ss - z) / dss;
    const double ua = 0.0, ub = 1.0;
    auto sub = [&](double u) -> cx { return full(u) - fs / (u - c); };
    cx total = fs * std::log((ub - c) / (ua - c));
    // geometric breakpoints around the nearest parameter, graded by the distance to z
    QuadratureOptions local = opt;
    local.max_depth = std::min(opt.max_depth, 3u);
    const double h0 = std::max(dist / std::abs(dss), 1e-15);
    std::vector<double> br{us};
    for (double h = h0; us + h < ub; h *= 2.0) br.push_back(us + h);
    br.push_back(ub);
    std::vector<double> left{us};
    for (double h = h0; us - h > ua; h *= 2.0) left.push_back(us - h);
    left.push_back(ua);
    for (std::size_t j = 0; j + 1 < br.size(); ++j)
        if (br[j + 1] > br[j]) total += integrate_gk(sub, br[j], br[j + 1], local);
    for (std::size_t j = 0; j + 1 < left.size(); ++j)
        if (left[j] > left[j + 1]) total += integrate_gk(sub, left[j + 1], left[j], local);
    return total;
}

/// Plain integral of g(s) ds along a piece.
inline cx integrate_piece(const Piece& p, const ComplexFn& g, const QuadratureOptions& opt = {}) {
    return integrate_gk([&](double u) -> cx { return g(p.s(u)) * p.ds(u); }, 0.0, 1.0, opt);
}

/// Derivative of an analytic function by the trapezoid rule on a small circle.
inline cx circle_derivative(const ComplexFn& f, cx z, double r, int n = 8) {
    cx acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const cx w = std::polar(1.0, 2.0 * pi * j / n);
        acc += f(z + r * w) / w;
    }
    return acc / (static_cast<double>(n) * r);
}

/// Chebyshev-Lobatto nodes on [-1, 1], ordered from -1 to 1.
inline std::vector<double> lobatto_nodes(std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j)
        u[j] = -std::cos(pi * static_cast<double>(j) / static_cast<double>(n - 1));
    return u;
}

/// Barycentric interpolation on Chebyshev-Lobatto nodes.
inline cx barycentric_lobatto(const std::vector<double>& u, const std::vector<cx>& v, double x) {
    const std::size_t n = u.size();
    cx num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = x - u[j];
        if (dx == 0.0) return v[j];
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w *= 0.5;
        num += w * v[j] / dx;
        den += w / dx;
    }
    return num / den;
}

/// Trigonometric barycentric interpolation on n (even) equispaced angles phi_j = 2 pi j / n.
inline cx barycentric_periodic(const std::vector<cx>& v, double phi) {
    const std::size_t n = v.size();
    cx num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double half = 0.5 * (phi - 2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
        const double sn = std::sin(half);
        if (std::abs(sn) < 1e-15) return v[j];
        const double w = ((j % 2 == 0) ? 1.0 : -1.0) * std::cos(half) / sn;
        num += w * v[j];
        den += w;
    }
    return num / den;
}

}  // namespace nmkdv
