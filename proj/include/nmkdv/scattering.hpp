#pragma once

#include "nmkdv/contour.hpp"
#include "nmkdv/parallel.hpp"
#include "nmkdv/spectral_core.hpp"
#include "nmkdv/types.hpp"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nmkdv {

/// Real initial profile q0 with constant tails: q0 = q_minus for x <= -L and q_plus for x >= L.
struct InitialDatum {
    int sigma = -1;
    double q_minus = 1.0;
    double q_plus = 1.0;
    double half_width = 40.0;
    std::function<double(double)> profile;

    double operator()(double x) const {
        if (x <= -half_width) return q_minus;
        if (x >= half_width) return q_plus;
        return profile(x);
    }

    static void check_boundary(int sigma, double q_minus, double q_plus) {
        if (sigma != 1 && sigma != -1) throw DomainError("sigma must be +1 or -1");
        if (std::abs(std::abs(q_minus) - 1.0) > 1e-12) throw DomainError("|q_minus| must be 1");
        if (std::abs(q_plus + sigma * q_minus) > 1e-12)
            throw DomainError("boundary values must satisfy q_plus = delta q_minus with sigma delta = -1");
    }

    static InitialDatum from_function(int sigma, double q_minus, std::function<double(double)> f,
                                      double half_width) {
        const double q_plus = -sigma * q_minus;
        check_boundary(sigma, q_minus, q_plus);
        return {sigma, q_minus, q_plus, half_width, std::move(f)};
    }

    /// Uniformly sampled profile, interpolated by a quintic B-spline with flat ends.
    static InitialDatum from_samples(int sigma, double q_minus, const std::vector<double>& x,
                                     const std::vector<double>& q) {
        if (x.size() != q.size() || x.size() < 8) throw DomainError("initial datum: need >= 8 samples");
        const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
        for (std::size_t i = 1; i < x.size(); ++i)
            if (std::abs(x[i] - x[i - 1] - h) > 1e-8 * std::max(1.0, std::abs(h)))
                throw DomainError("initial datum: grid must be uniform");
        const double q_plus = -sigma * q_minus;
        check_boundary(sigma, q_minus, q_plus);
        auto spline = std::make_shared<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
            q, x.front(), h, std::pair<double, double>{0.0, 0.0}, std::pair<double, double>{0.0, 0.0});
        const double x0 = x.front(), x1 = x.back();
        const double L = std::min(-x0, x1);
        auto f = [spline, x0, x1, q_minus, q_plus](double s) {
            if (s <= x0) return q_minus;
            if (s >= x1) return q_plus;
            return (*spline)(s);
        };
        return {sigma, q_minus, q_plus, L, f};
    }

    /// Discrete weighted tail norm  sum |q0 - q_pm| <x>^2 h over the window.
    double tail_moment(double h = 1e-2) const {
        double acc = 0.0;
        for (double x = -half_width; x <= half_width; x += h) {
            const double ref = x < 0 ? q_minus : q_plus;
            acc += std::abs((*this)(x) - ref) * (1.0 + x * x) * h;
        }
        return acc;
    }
};

inline InitialDatum read_initial_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    int sigma = 0;
    double q_minus = std::nan("");
    std::vector<double> xs, qs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            const double val = std::stod(line.substr(eq + 1));
            if (key == "sigma") sigma = static_cast<int>(val);
            if (key == "q_minus") q_minus = val;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '+' &&
            line[0] != '.')
            continue;  // column header
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        xs.push_back(std::stod(a));
        qs.push_back(std::stod(b));
    }
    if (sigma == 0 || std::isnan(q_minus)) throw DomainError(path + ": missing sigma or q_minus header");
    return InitialDatum::from_samples(sigma, q_minus, xs, qs);
}

/// Background eigenvector matrix E(z) = [[1, i q / z], [i q / z, 1]].
inline Mat2 background_E(double q, cx z) {
    Mat2 e;
    e << 1.0, I * q / z, I * q / z, 1.0;
    return e;
}

struct JostOptions {
    double rtol = 1e-12;
    double atol = 1e-13;
    double regular_radius = 1e-3;
};

/// Modified Jost matrices at one x. Columns follow the analyticity split:
/// mu_plus.col(0), mu_minus.col(1) extend to D+, mu_minus.col(0), mu_plus.col(1) to D-.
struct JostPair {
    cx z;
    double x;
    Mat2 mu_plus, mu_minus;
    Mat2 E_plus, E_minus;
};

namespace detail {

using State2 = std::array<cx, 2>;

/// mu' = (X - s i lambda) mu with X = i k sigma3 + [[0, q(x)], [sigma q(-x), 0]].
inline void integrate_column(const InitialDatum& d, cx z, State2& y, double x_from, double x_to, int s,
                             const JostOptions& opt, const std::function<void(const State2&, double)>* obs = nullptr) {
    if (x_from == x_to) return;
    const Uniformization u = uniformize(z);
    const cx shift = static_cast<double>(s) * I * u.lambda;
    const cx ik = I * u.k;
    const double sg = d.sigma;
    auto rhs = [&](const State2& v, State2& dv, double x) {
        const double qx = d(x), qmx = d(-x);
        dv[0] = (ik - shift) * v[0] + qx * v[1];
        dv[1] = sg * qmx * v[0] + (-ik - shift) * v[1];
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_fehlberg78<State2>());
    const double scale = 1.0 + std::abs(u.lambda) + std::abs(u.k);
    double dt = (x_to > x_from ? 1.0 : -1.0) * std::min(0.1, 0.5 / scale);
    if (obs) {
        ode::integrate_adaptive(stepper, rhs, y, x_from, x_to, dt, *obs);
    } else {
        ode::integrate_adaptive(stepper, rhs, y, x_from, x_to, dt);
    }
}

inline Vec2 to_vec(const State2& s) { return Vec2(s[0], s[1]); }

}  // namespace detail

/// Modified Jost solutions at x, launched from the edges of the datum window with E(z) data.
inline JostPair jost_solve(const InitialDatum& d, cx z, double x = 0.0, const JostOptions& opt = {}) {
    if (z == cx(0.0)) throw DomainError("jost_solve: z = 0");
    if (std::abs(z) < opt.regular_radius) {
        // mu(z) = (i q / z) mu(-1/z) sigma1, valid on both sides
        JostPair far = jost_solve(d, -1.0 / z, x, opt);
        JostPair out = far;
        out.z = z;
        out.mu_plus = (I * d.q_plus / z) * far.mu_plus * pauli1();
        out.mu_minus = (I * d.q_minus / z) * far.mu_minus * pauli1();
        out.E_plus = background_E(d.q_plus, z);
        out.E_minus = background_E(d.q_minus, z);
        return out;
    }
    JostPair jp;
    jp.z = z;
    jp.x = x;
    jp.E_plus = background_E(d.q_plus, z);
    jp.E_minus = background_E(d.q_minus, z);
    const double L = d.half_width;
    for (int col = 0; col < 2; ++col) {
        const int s = col == 0 ? 1 : -1;
        detail::State2 yp{jp.E_plus(0, col), jp.E_plus(1, col)};
        detail::integrate_column(d, z, yp, std::max(L, x), x, s, opt);
        jp.mu_plus.col(col) = detail::to_vec(yp);
        detail::State2 ym{jp.E_minus(0, col), jp.E_minus(1, col)};
        detail::integrate_column(d, z, ym, std::min(-L, x), x, s, opt);
        jp.mu_minus.col(col) = detail::to_vec(ym);
    }
    return jp;
}

/// Maximum of |det Phi(x,z) - (1 + z^-2)| along the integration of Phi_+ (side = +1) or Phi_- (side = -1).
inline double det_deviation(const InitialDatum& d, cx z, int side, const JostOptions& opt = {}) {
    const double L = d.half_width;
    const double x_from = side > 0 ? L : -L, x_to = -x_from;
    const Mat2 E = background_E(side > 0 ? d.q_plus : d.q_minus, z);
    const cx target = 1.0 + 1.0 / (z * z);
    // the two columns are integrated jointly so that both are known at every step
    using State4 = std::array<cx, 4>;
    const Uniformization u = uniformize(z);
    const cx ik = I * u.k, il = I * u.lambda;
    const double sg = d.sigma;
    auto rhs = [&](const State4& v, State4& dv, double x) {
        const double qx = d(x), qmx = d(-x);
        dv[0] = (ik - il) * v[0] + qx * v[1];
        dv[1] = sg * qmx * v[0] + (-ik - il) * v[1];
        dv[2] = (ik + il) * v[2] + qx * v[3];
        dv[3] = sg * qmx * v[2] + (-ik + il) * v[3];
    };
    State4 y{E(0, 0), E(1, 0), E(0, 1), E(1, 1)};
    double worst = std::abs(y[0] * y[3] - y[1] * y[2] - target);
    auto obs = [&](const State4& v, double) {
        worst = std::max(worst, std::abs(v[0] * v[3] - v[1] * v[2] - target));
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_fehlberg78<State4>());
    const double scale = 1.0 + std::abs(u.lambda) + std::abs(u.k);
    ode::integrate_adaptive(stepper, rhs, y, x_from, x_to, (x_to > x_from ? 1.0 : -1.0) * std::min(0.1, 0.5 / scale), obs);
    return worst;
}

inline cx det2(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

struct ScatteringCoefficients {
    cx s11{}, s12{}, s21{}, s22{};
    /// Raw Wronskians det(Phi+1, Phi-2), det(Phi+2, Phi-2), det(Phi-1, Phi+1), det(Phi-1, Phi+2) at x = 0.
    cx w11{}, w12{}, w21{}, w22{};
    bool branch_point = false;  // z = +-i: s_ij undefined, s_pm holds the residue constant
    cx s_pm{};
};

inline ScatteringCoefficients coefficients_from(const JostPair& jp) {
    ScatteringCoefficients c;
    const cx z = jp.z;
    // Wronskians of Phi equal those of mu at x = 0 because the exponentials cancel there
    const Vec2 p1 = jp.mu_plus.col(0), p2 = jp.mu_plus.col(1);
    const Vec2 m1 = jp.mu_minus.col(0), m2 = jp.mu_minus.col(1);
    const cx e2 = std::exp(2.0 * I * uniformize(z).lambda * jp.x);
    c.w11 = det2(p1, m2);
    c.w12 = det2(p2, m2) / e2;
    c.w21 = det2(m1, p1) * e2;
    c.w22 = det2(m1, p2);
    const cx den = 1.0 + 1.0 / (z * z);
    if (std::abs(z - I) < 1e-12 || std::abs(z + I) < 1e-12) {
        c.branch_point = true;
        c.s_pm = c.w11 / (2.0 * I);
        return c;
    }
    c.s11 = c.w11 / den;
    c.s12 = c.w12 / den;
    c.s21 = c.w21 / den;
    c.s22 = c.w22 / den;
    return c;
}

inline ScatteringCoefficients scattering_coefficients(const InitialDatum& d, cx z, const JostOptions& opt = {}) {
    return coefficients_from(jost_solve(d, z, 0.0, opt));
}

struct Reflection {
    cx rho, rho_tilde;
};

/// rho = s21/s11 and rho~ = s12/s22 as Wronskian ratios, so the 1 + z^-2 factor never divides.
/// At z = +-i the limit is +-sigma whenever s^{+-} != 0. When s^{+-} vanishes (s11 regular there, as for
/// reflectionless data) the ratio is 0/0 and the value is taken as the mean of two nearby circle points.
inline Reflection reflection(const InitialDatum& d, cx z, const JostOptions& opt = {}) {
    const bool at_i = std::abs(z - I) < 1e-12, at_mi = std::abs(z + I) < 1e-12;
    if (at_i || at_mi) {
        const ScatteringCoefficients c = scattering_coefficients(d, at_i ? I : -I, opt);
        if (std::abs(c.s_pm) > 1e-8) {
            const cx v(at_i ? d.sigma : -d.sigma);
            return {v, v};
        }
        const double ph = at_i ? 0.5 * pi : -0.5 * pi, h = 10.0 * opt.regular_radius;
        const Reflection a = reflection(d, std::polar(1.0, ph - h), opt);
        const Reflection b = reflection(d, std::polar(1.0, ph + h), opt);
        return {0.5 * (a.rho + b.rho), 0.5 * (a.rho_tilde + b.rho_tilde)};
    }
    const ScatteringCoefficients c = scattering_coefficients(d, z, opt);
    const double near_branch = std::min(std::abs(z - I), std::abs(z + I));
    if (near_branch >= opt.regular_radius && (std::abs(c.s11) < 1e-10 || std::abs(c.s22) < 1e-10))
        throw DomainError("spectral singularity: s11 or s22 vanishes on the contour");
    return {c.w21 / c.w11, c.w12 / c.w22};
}

/// Samples of rho and rho~ on the contour: Chebyshev-Lobatto nodes mapped to each real half-line
/// by s = (1+u)/(1-u), and equispaced nodes on the unit circle. Beyond |s| > cutoff (or < 1/cutoff)
/// the z^-2 (respectively z^2) decay is extrapolated from the last computed node.
struct ContourSamples {
    std::vector<double> u;
    std::vector<cx> rho_pos, rho_neg, rhot_pos, rhot_neg;
    std::vector<cx> rho_circ, rhot_circ;
    double cutoff = 50.0;

    static double node_to_s(double u) {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return std::numeric_limits<double>::infinity();
        return (1.0 + u) / (1.0 - u);
    }

    static bool on_real(cx z) { return std::abs(z.imag()) <= 1e-12 * (1.0 + std::abs(z)); }
    static bool on_circle(cx z) { return std::abs(std::abs(z) - 1.0) <= 1e-10; }

    cx eval(const std::vector<cx>& pos, const std::vector<cx>& neg, const std::vector<cx>& circ, cx z) const {
        if (on_real(z)) {
            const double s = z.real();
            if (s == 0.0) return 0.0;
            const double a = std::abs(s);
            const double uu = (a - 1.0) / (a + 1.0);
            return barycentric_lobatto(u, s > 0 ? pos : neg, uu);
        }
        if (on_circle(z)) {
            double ph = std::arg(z);
            if (ph < 0) ph += 2.0 * pi;
            return barycentric_periodic(circ, ph);
        }
        throw DomainError("contour samples: point is not on the contour");
    }

    cx rho(cx z) const { return eval(rho_pos, rho_neg, rho_circ, z); }
    cx rho_tilde(cx z) const { return eval(rhot_pos, rhot_neg, rhot_circ, z); }
};

struct SamplingOptions {
    std::size_t line_nodes = 512;
    std::size_t quarter_nodes = 256;
    double cutoff = 50.0;
    unsigned threads = 0;
    JostOptions jost{};
};

inline ContourSamples sample_contour(const InitialDatum& d, const SamplingOptions& opt = {}) {
    ContourSamples cs;
    cs.cutoff = opt.cutoff;
    cs.u = lobatto_nodes(opt.line_nodes);
    const std::size_t n = cs.u.size();
    const std::size_t nc = 4 * opt.quarter_nodes;
    cs.rho_pos.assign(n, 0.0);
    cs.rho_neg.assign(n, 0.0);
    cs.rhot_pos.assign(n, 0.0);
    cs.rhot_neg.assign(n, 0.0);
    cs.rho_circ.assign(nc, 0.0);
    cs.rhot_circ.assign(nc, 0.0);
    const double cmin = 1.0 / opt.cutoff;
    std::vector<std::size_t> inside;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = ContourSamples::node_to_s(cs.u[j]);
        if (s >= cmin && s <= opt.cutoff && std::abs(s - 1.0) > 0.0) inside.push_back(j);
        else if (std::abs(s - 1.0) == 0.0) inside.push_back(j);
    }
    const std::size_t tasks = 2 * inside.size() + nc;
    parallel_for(tasks, opt.threads, [&](std::size_t t) {
        if (t < 2 * inside.size()) {
            const std::size_t j = inside[t / 2];
            const double s = ContourSamples::node_to_s(cs.u[j]);
            const bool pos = (t % 2 == 0);
            const Reflection r = reflection(d, cx(pos ? s : -s), opt.jost);
            (pos ? cs.rho_pos : cs.rho_neg)[j] = r.rho;
            (pos ? cs.rhot_pos : cs.rhot_neg)[j] = r.rho_tilde;
        } else {
            const std::size_t j = t - 2 * inside.size();
            const cx z = std::polar(1.0, 2.0 * pi * static_cast<double>(j) / static_cast<double>(nc));
            const Reflection r = reflection(d, z, opt.jost);
            cs.rho_circ[j] = r.rho;
            cs.rhot_circ[j] = r.rho_tilde;
        }
    });
    if (!inside.empty()) {
        const std::size_t lo = inside.front(), hi = inside.back();
        const double s_lo = ContourSamples::node_to_s(cs.u[lo]);
        const double s_hi = ContourSamples::node_to_s(cs.u[hi]);
        for (std::size_t j = 0; j < n; ++j) {
            if (j >= lo && j <= hi) continue;
            const double s = ContourSamples::node_to_s(cs.u[j]);
            if (j < lo) {
                const double f = std::isfinite(s) ? (s / s_lo) * (s / s_lo) : 0.0;
                for (auto* v : {&cs.rho_pos, &cs.rho_neg, &cs.rhot_pos, &cs.rhot_neg}) (*v)[j] = (*v)[lo] * f;
            } else {
                const double f = std::isfinite(s) ? (s_hi / s) * (s_hi / s) : 0.0;
                for (auto* v : {&cs.rho_pos, &cs.rho_neg, &cs.rhot_pos, &cs.rhot_neg}) (*v)[j] = (*v)[hi] * f;
            }
        }
    }
    return cs;
}

/// One discrete eigenvalue of s11 in D+ with its norming data.
struct DiscreteEigen {
    enum class Kind { Complex, Mirror, Imaginary };
    cx eta;
    cx A;       // norming constant A[eta] = b / s11'(eta)
    cx b;       // proportionality constant Phi+1 = b Phi-2
    cx ds11;    // s11'(eta)
    Kind kind = Kind::Complex;

    cx eta_hat() const { return -1.0 / eta; }
    cx A_hat() const { return eta_hat() * eta_hat() * A; }
};

/// Scattering data consumed by the inverse problem: reflection coefficients on the contour and the
/// discrete spectrum. rho and rho~ are callables so that both sampled and synthetic profiles fit.
struct ScatteringData {
    int sigma = -1;
    double q_minus = 1.0;
    double q_plus = 1.0;
    ComplexFn rho = [](cx) { return cx(0.0); };
    ComplexFn rho_tilde = [](cx) { return cx(0.0); };
    std::vector<DiscreteEigen> discrete;
    std::shared_ptr<const ContourSamples> samples;
    bool reflectionless = true;
};

inline ScatteringData from_samples(const InitialDatum& d, ContourSamples cs, std::vector<DiscreteEigen> disc) {
    auto sp = std::make_shared<const ContourSamples>(std::move(cs));
    ScatteringData s;
    s.sigma = d.sigma;
    s.q_minus = d.q_minus;
    s.q_plus = d.q_plus;
    s.rho = [sp](cx z) { return sp->rho(z); };
    s.rho_tilde = [sp](cx z) { return sp->rho_tilde(z); };
    s.samples = sp;
    s.discrete = std::move(disc);
    s.reflectionless = false;
    return s;
}

/// Synthetic profile rho(z) = (a + i b z) z^2 / ((z^2 + 2)^2 (z^2 + 1/2)), rho~(z) = rho(-1/z):
/// O(z^2) at 0, O(z^-3) at infinity, analytic near Sigma, rho(-z) = conj rho(z) on R. No discrete spectrum.
inline ScatteringData synthetic_reflection(int sigma, double q_minus, double a, double b) {
    ScatteringData s;
    s.sigma = sigma;
    s.q_minus = q_minus;
    s.q_plus = -sigma * q_minus;
    auto r = [a, b](cx z) {
        const cx z2 = z * z;
        return (a + I * b * z) * z2 / ((z2 + 2.0) * (z2 + 2.0) * (z2 + 0.5));
    };
    s.rho = r;
    s.rho_tilde = [r](cx z) { return z == 0.0 ? cx(0.0) : r(-1.0 / z); };
    s.reflectionless = false;
    return s;
}

struct SpectrumOptions {
    double radius = 8.0;   // outer zeros searched in 1 < |z| < radius, inner in 1/radius < |z| < 1
    double margin = 0.03;  // distance kept from the contour
    int grid_r = 14;
    int grid_phi = 28;
    double newton_tol = 1e-13;
    double b_window = 2.0;
    unsigned threads = 0;
    JostOptions jost{};
};

struct SpectrumReport {
    std::vector<DiscreteEigen> eigen;
    int winding = 0;       // argument-principle count in the searched part of D+
    int newton_roots = 0;  // converged Newton roots in the same set
};

namespace detail {

/// Winding number of f along a closed path gamma(tau), tau in [0, 1], with adaptive refinement.
inline int winding_number(const ComplexFn& f, const std::function<cx(double)>& gamma, int n0, unsigned threads) {
    std::vector<double> taus(static_cast<std::size_t>(n0) + 1);
    for (int i = 0; i <= n0; ++i) taus[static_cast<std::size_t>(i)] = static_cast<double>(i) / n0;
    std::vector<cx> vals(taus.size());
    parallel_for(taus.size(), threads, [&](std::size_t i) { vals[i] = f(gamma(taus[i])); });
    double total = 0.0;
    std::function<double(double, double, cx, cx, int)> seg = [&](double a, double b, cx fa, cx fb, int depth) {
        const double da = std::arg(fb / fa);
        if (std::abs(da) < 0.4 || depth > 30) return da;
        const double m = 0.5 * (a + b);
        const cx fm = f(gamma(m));
        return seg(a, m, fa, fm, depth + 1) + seg(m, b, fm, fb, depth + 1);
    };
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) total += seg(taus[i], taus[i + 1], vals[i], vals[i + 1], 0);
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

/// Closed boundary of the polar sector r in [r0, r1], phi in [p0, p1], counterclockwise.
inline std::function<cx(double)> sector_boundary(double r0, double r1, double p0, double p1) {
    return [=](double tau) -> cx {
        const double s = 4.0 * tau;
        if (s < 1.0) return std::polar(r0 + (r1 - r0) * s, p0);
        if (s < 2.0) return std::polar(r1, p0 + (p1 - p0) * (s - 1.0));
        if (s < 3.0) return std::polar(r1 - (r1 - r0) * (s - 2.0), p1);
        return std::polar(r0, p1 - (p1 - p0) * (s - 3.0));
    };
}

}  // namespace detail

/// Zeros of s11 in D+ by argument-principle count plus Newton refinement, with norming constants.
inline SpectrumReport find_discrete_spectrum(const InitialDatum& d, const SpectrumOptions& opt = {}) {
    auto s11 = [&](cx z) { return scattering_coefficients(d, z, opt.jost).w11 / (1.0 + 1.0 / (z * z)); };
    struct Sector {
        double r0, r1, p0, p1;
    };
    const double eps = opt.margin;
    const std::array<Sector, 2> sectors{Sector{1.0 + eps, opt.radius, eps, pi - eps},
                                        Sector{1.0 / opt.radius, 1.0 - eps, -pi + eps, -eps}};
    SpectrumReport rep;
    std::vector<cx> roots;
    for (const Sector& sc : sectors) {
        const int w = detail::winding_number(s11, detail::sector_boundary(sc.r0, sc.r1, sc.p0, sc.p1), 256, opt.threads);
        rep.winding += w;
        if (w == 0) continue;
        for (int attempt = 0; attempt < 3; ++attempt) {
            const int nr = opt.grid_r << attempt, np = opt.grid_phi << attempt;
            std::vector<cx> grid(static_cast<std::size_t>(nr * np));
            std::vector<double> mag(grid.size());
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < np; ++j) {
                    const double r = sc.r0 * std::pow(sc.r1 / sc.r0, (i + 0.5) / nr);
                    const double p = sc.p0 + (sc.p1 - sc.p0) * (j + 0.5) / np;
                    grid[static_cast<std::size_t>(i * np + j)] = std::polar(r, p);
                }
            parallel_for(grid.size(), opt.threads, [&](std::size_t k) { mag[k] = std::abs(s11(grid[k])); });
            std::vector<cx> starts;
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < np; ++j) {
                    const double m = mag[static_cast<std::size_t>(i * np + j)];
                    bool is_min = true;
                    for (int di = -1; di <= 1 && is_min; ++di)
                        for (int dj = -1; dj <= 1; ++dj) {
                            const int ii = i + di, jj = j + dj;
                            if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= nr || jj >= np) continue;
                            if (mag[static_cast<std::size_t>(ii * np + jj)] < m) {
                                is_min = false;
                                break;
                            }
                        }
                    if (is_min) starts.push_back(grid[static_cast<std::size_t>(i * np + j)]);
                }
            std::vector<std::optional<cx>> found(starts.size());
            parallel_for(starts.size(), opt.threads, [&](std::size_t k) {
                cx z = starts[k];
                for (int it = 0; it < 60; ++it) {
                    const cx f = s11(z);
                    const cx df = circle_derivative(s11, z, 1e-3 * std::max(1.0, std::abs(z)) * std::min(1.0, std::abs(z)));
                    const cx step = f / df;
                    z -= step;
                    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
                    if (std::abs(step) < opt.newton_tol * (1.0 + std::abs(z))) {
                        const double r = std::abs(z), p = std::arg(z);
                        if (r > sc.r0 && r < sc.r1 && p > sc.p0 && p < sc.p1) found[k] = z;
                        return;
                    }
                }
            });
            std::vector<cx> local;
            for (const auto& f : found) {
                if (!f) continue;
                bool dup = false;
                for (cx r : local) dup = dup || std::abs(r - *f) < 1e-7 * (1.0 + std::abs(r));
                if (!dup) local.push_back(*f);
            }
            if (static_cast<int>(local.size()) == w || attempt == 2) {
                rep.newton_roots += static_cast<int>(local.size());
                roots.insert(roots.end(), local.begin(), local.end());
                break;
            }
        }
    }
    if (rep.newton_roots != rep.winding)
        throw ConvergenceError("discrete spectrum: argument principle counts " + std::to_string(rep.winding) +
                               " zeros but Newton converged to " + std::to_string(rep.newton_roots));

    // keep one representative of each (z, -conj z) pair, then complete by symmetry
    std::vector<DiscreteEigen> out;
    for (cx z : roots) {
        const double tol_axis = 1e-8 * (1.0 + std::abs(z));
        DiscreteEigen e;
        if (std::abs(z.real()) < tol_axis) {
            e.eta = cx(0.0, z.imag());
            e.kind = DiscreteEigen::Kind::Imaginary;
        } else if (z.real() > 0) {
            e.eta = z;
            e.kind = DiscreteEigen::Kind::Complex;
        } else {
            continue;
        }
        out.push_back(e);
    }
    std::vector<DiscreteEigen> full;
    for (const auto& e : out) {
        full.push_back(e);
        if (e.kind == DiscreteEigen::Kind::Complex) {
            DiscreteEigen m = e;
            m.eta = -std::conj(e.eta);
            m.kind = DiscreteEigen::Kind::Mirror;
            full.push_back(m);
        }
    }
    // norming constants: b by least squares over a window of x, s11' by the circle rule
    parallel_for(full.size(), opt.threads, [&](std::size_t k) {
        DiscreteEigen& e = full[k];
        const cx z = e.eta;
        const cx lam = uniformize(z).lambda;
        cx num = 0.0;
        double den = 0.0;
        for (int j = -4; j <= 4; ++j) {
            const double x = opt.b_window * j / 4.0;
            const JostPair jp = jost_solve(d, z, x, opt.jost);
            const Vec2 phi_p1 = jp.mu_plus.col(0) * std::exp(I * lam * x);
            const Vec2 phi_m2 = jp.mu_minus.col(1) * std::exp(-I * lam * x);
            num += phi_m2.dot(phi_p1);  // conj(phi_m2) . phi_p1
            den += phi_m2.squaredNorm();
        }
        e.b = num / den;
        e.ds11 = circle_derivative(s11, z, 1e-3 * std::min(1.0, std::abs(z)), 16);
        if (std::abs(e.ds11) < 1e-8) throw ConvergenceError("discrete spectrum: near-multiple zero");
        e.A = e.b / e.ds11;
    });
    rep.eigen = std::move(full);
    return rep;
}

}  // namespace nmkdv
