#pragma once

#include "nmkdv/types.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nmkdv {

using SpaceTimeFn = std::function<cx(double, double)>;

/// |q_t - 6 sigma q(x,t) q(-x,-t) q_x + q_xxx| with central differences of spacing h in x and t.
inline double residual(const SpaceTimeFn& q, int sigma, double x, double t, double h) {
    const cx qt = (q(x, t + h) - q(x, t - h)) / (2.0 * h);
    const cx qm2 = q(x - 2 * h, t), qm1 = q(x - h, t), q1 = q(x + h, t), q2 = q(x + 2 * h, t);
    const cx qx = (q1 - qm1) / (2.0 * h);
    const cx qxxx = (q2 - 2.0 * q1 + 2.0 * qm1 - qm2) / (2.0 * h * h * h);
    return std::abs(qt - 6.0 * sigma * q(x, t) * q(-x, -t) * qx + qxxx);
}

/// Samples q(x_i, t_j) on uniform grids symmetric about 0 in both x and t.
struct FieldSeries {
    std::vector<double> x, t;
    std::vector<std::vector<cx>> q;  // q[j][i] at (x_i, t_j)
};

struct ResidualSample {
    double x, t, value;
};

/// Grid residual at interior points whose mirror (-x, -t) lies on the grid.
inline std::vector<ResidualSample> residual_grid(const FieldSeries& f, int sigma) {
    const std::size_t nx = f.x.size(), nt = f.t.size();
    if (nx < 5 || nt < 3) throw DomainError("residual_grid: need >= 5 x nodes and >= 3 t nodes");
    const double hx = (f.x.back() - f.x.front()) / static_cast<double>(nx - 1);
    const double ht = (f.t.back() - f.t.front()) / static_cast<double>(nt - 1);
    if (std::abs(f.x.front() + f.x.back()) > 1e-9 * (1.0 + std::abs(f.x.back())) ||
        std::abs(f.t.front() + f.t.back()) > 1e-9 * (1.0 + std::abs(f.t.back())))
        throw DomainError("residual_grid: x and t grids must be symmetric about 0");
    std::vector<ResidualSample> out;
    for (std::size_t j = 1; j + 1 < nt; ++j)
        for (std::size_t i = 2; i + 2 < nx; ++i) {
            const auto& r = f.q[j];
            const cx qt = (f.q[j + 1][i] - f.q[j - 1][i]) / (2.0 * ht);
            const cx qx = (r[i + 1] - r[i - 1]) / (2.0 * hx);
            const cx qxxx = (r[i + 2] - 2.0 * r[i + 1] + 2.0 * r[i - 1] - r[i - 2]) / (2.0 * hx * hx * hx);
            const cx mirror = f.q[nt - 1 - j][nx - 1 - i];
            out.push_back({f.x[i], f.t[j], std::abs(qt - 6.0 * sigma * r[i] * mirror * qx + qxxx)});
        }
    return out;
}

/// u(x,t) ~ q(x,t) and v(x,t) ~ q(-x,-t) on a uniform grid; both obey
/// w_t - 6 sigma u v w_x + w_xxx = 0.
struct CoupledState {
    int sigma = -1;
    double q_minus = 1.0, q_plus = 1.0;
    double t = 0.0;
    double h = 0.05;
    std::vector<double> x;
    std::vector<cx> u, v;
};

inline CoupledState make_coupled_state(int sigma, double q_minus, const std::function<cx(double)>& q0,
                                       double half_width = 40.0, double h = 0.05) {
    CoupledState s;
    s.sigma = sigma;
    s.q_minus = q_minus;
    s.q_plus = -sigma * q_minus;
    s.h = h;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * half_width / h)) + 1;
    s.x.resize(n);
    s.u.resize(n);
    s.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.x[i] = -half_width + h * static_cast<double>(i);
    // grid symmetric about 0, so v(x_i, 0) = u(-x_i, 0) = u at the mirrored index
    for (std::size_t i = 0; i < n; ++i) s.u[i] = q0(s.x[i]);
    for (std::size_t i = 0; i < n; ++i) s.v[i] = s.u[n - 1 - i];
    return s;
}

/// Integral of u v - q_minus q_plus, which vanishes on the background.
inline cx conserved_quantity(const CoupledState& s) {
    const double bg = s.q_minus * s.q_plus;
    cx acc = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double w = (i == 0 || i + 1 == s.x.size()) ? 0.5 : 1.0;
        acc += w * (s.u[i] * s.v[i] - bg);
    }
    return acc * s.h;
}

struct EvolveOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    double ramp_width = 2.0;
    double blowup = 1e3;
};

struct EvolveResult {
    CoupledState state;
    cx conserved_start{}, conserved_end{};
    bool edge_warning = false;
    std::size_t steps = 0;
};

namespace detail {

/// Smooth ramp R(x) from q_minus to q_plus and its first and third derivatives.
struct Ramp {
    double qm, qp, l;
    void eval(double x, double& r, double& r1, double& r3) const {
        if (qm == qp) {
            r = qm;
            r1 = r3 = 0.0;
            return;
        }
        const double th = std::tanh(x / l), s2 = 1.0 - th * th;
        const double a = 0.5 * (qp - qm);
        r = 0.5 * (qm + qp) + a * th;
        r1 = a * s2 / l;
        r3 = a * (4.0 * s2 * th * th - 2.0 * s2 * s2) / (l * l * l);
    }
};

}  // namespace detail

/// Method of lines: background ramp plus a decaying remainder, fourth-order central differences
/// in space (zero remainder beyond the window) and adaptive Dormand-Prince in time.
inline EvolveResult evolve(CoupledState s, double t_end, double dt, const EvolveOptions& opt = {}) {
    const std::size_t n = s.x.size();
    const double h = s.h;
    const detail::Ramp ru{s.q_minus, s.q_plus, opt.ramp_width};
    const detail::Ramp rv{s.q_plus, s.q_minus, opt.ramp_width};  // v(x) = u(-x) swaps the tails
    std::vector<double> Ru(n), Ru1(n), Ru3(n), Rv(n), Rv1(n), Rv3(n);
    for (std::size_t i = 0; i < n; ++i) {
        ru.eval(s.x[i], Ru[i], Ru1[i], Ru3[i]);
        rv.eval(s.x[i], Rv[i], Rv1[i], Rv3[i]);
    }
    using State = std::vector<cx>;
    State y(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = s.u[i] - Ru[i];
        y[n + i] = s.v[i] - Rv[i];
    }
    auto edge_energy = [&](const State& w) {
        const std::size_t m = std::max<std::size_t>(1, n / 20);
        double e = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            e += std::norm(w[i]) + std::norm(w[n - 1 - i]) + std::norm(w[n + i]) + std::norm(w[2 * n - 1 - i]);
        return e;
    };
    const double e0 = edge_energy(y);
    EvolveResult res;
    res.conserved_start = conserved_quantity(s);
    const int sg = s.sigma;
    const double c1 = 1.0 / (12.0 * h), c3 = 1.0 / (8.0 * h * h * h);
    std::vector<cx> pad(n + 6, cx(0.0));  // remainder with three zero ghost cells on each side
    auto rhs = [&](const State& w, State& dw, double) {
        for (int f = 0; f < 2; ++f) {
            const cx* a = w.data() + f * n;
            const cx* other = w.data() + (1 - f) * n;
            const std::vector<double>& R = f == 0 ? Ru : Rv;
            const std::vector<double>& Ro = f == 0 ? Rv : Ru;
            const std::vector<double>& R1 = f == 0 ? Ru1 : Rv1;
            const std::vector<double>& R3 = f == 0 ? Ru3 : Rv3;
            std::copy(a, a + n, pad.begin() + 3);
            const cx* p = pad.data() + 3;
            for (std::size_t k = 0; k < n; ++k) {
                const cx d1 = (-p[k + 2] + 8.0 * p[k + 1] - 8.0 * p[k - 1] + p[k - 2]) * c1;
                const cx d3 = (p[k - 3] - 8.0 * p[k - 2] + 13.0 * p[k - 1] - 13.0 * p[k + 1] + 8.0 * p[k + 2] -
                               p[k + 3]) * c3;
                const cx uu = R[k] + a[k], vv = Ro[k] + other[k];
                dw[f * n + k] = 6.0 * sg * uu * vv * (R1[k] + d1) - (R3[k] + d3);
            }
        }
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
    std::size_t steps = 0;
    auto obs = [&](const State& w, double tt) {
        ++steps;
        for (std::size_t i = 0; i < 2 * n; ++i)
            if (std::abs(w[i] + (i < n ? Ru[i] : Rv[i - n])) > opt.blowup)
                throw ConvergenceError("evolve: blow-up |u| > " + std::to_string(opt.blowup) + " at t = " +
                                       std::to_string(tt) + ", x = " + std::to_string(s.x[i % n]));
    };
    if (t_end > s.t) ode::integrate_adaptive(stepper, rhs, y, s.t, t_end, dt, obs);
    for (std::size_t i = 0; i < n; ++i) {
        s.u[i] = Ru[i] + y[i];
        s.v[i] = Rv[i] + y[n + i];
    }
    s.t = t_end;
    const double e1 = edge_energy(y);
    res.edge_warning = e1 > 10.0 * e0 && e1 > 1e-12;
    res.steps = steps;
    res.conserved_end = conserved_quantity(s);
    res.state = std::move(s);
    return res;
}

}  // namespace nmkdv
