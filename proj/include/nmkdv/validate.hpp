#pragma once

#include "nmkdv/asymptotics.hpp"
#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/rh_transforms.hpp"
#include "nmkdv/scattering.hpp"
#include "nmkdv/soliton.hpp"

#include <json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace nmkdv {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Report {
    std::string mode;
    std::vector<Check> checks;
    nlohmann::json data = nlohmann::json::object();

    bool pass() const {
        for (const Check& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const Check& c : checks)
            arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance},
                           {"detail", c.detail}});
        return {{"mode", mode}, {"pass", pass()}, {"checks", arr}, {"data", data}};
    }
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// One pole pair on the imaginary axis: i omega and -i / omega with b = (1, -1).
inline SolitonSeed imaginary_pair_seed(double omega = 1.5, int sigma = -1, double q_minus = 1.0) {
    return reflectionless_seed(sigma, q_minus, {cx(0.0, omega), cx(0.0, -1.0 / omega)}, {1.0, -1.0});
}

/// Eigenvalue eta1 of D- (|eta1| < 1, Im eta1 > 0) realised through its image z1 = 1/conj(eta1) in D+,
/// the mirror -conj(z1) and the imaginary pole that balances s11(0) = 1.
inline SolitonSeed roundtrip_seed(cx eta1 = {0.5, 0.8}) {
    const cx z1 = 1.0 / std::conj(eta1);
    std::vector<cx> etas{z1, -std::conj(z1)};
    etas.push_back(imaginary_compensator(etas));
    return reflectionless_seed(-1, 1.0, etas, {-1.0, -1.0, 1.0});
}

/// Reflectionless scattering data carrying the seed poles.
inline ScatteringData reflectionless_data(const SolitonSeed& seed) {
    ScatteringData sd;
    sd.sigma = seed.sigma;
    sd.q_minus = seed.q_minus;
    sd.q_plus = -seed.sigma * seed.q_minus;
    for (const SeedPole& p : seed.poles) {
        DiscreteEigen e;
        e.eta = p.eta;
        e.A = p.A;
        const PoleKind k = classify_pole(p.eta);
        e.kind = k == PoleKind::Complex ? DiscreteEigen::Kind::Complex
                 : k == PoleKind::Mirror ? DiscreteEigen::Kind::Mirror
                                         : DiscreteEigen::Kind::Imaginary;
        sd.discrete.push_back(e);
    }
    return sd;
}

struct ResidualStudy {
    std::vector<double> h, residual;
    double order = 0.0;
};

inline ResidualStudy residual_study(const SolitonSeed& seed, double x, double t, const std::vector<double>& hs) {
    ResidualStudy r;
    r.h = hs;
    auto q = [&](double xx, double tt) { return q_soliton(seed, xx, tt); };
    for (double h : hs) r.residual.push_back(residual(q, seed.sigma, x, t, h));
    r.order = loglog_slope(r.h, r.residual);
    return r;
}

struct RoundTripStudy {
    std::vector<DiscreteEigen> recovered;
    int winding = 0;
    double eta_error = 0.0;   // distance of eta1 to the nearest recovered eta or eta_hat
    double A_error = 0.0;     // max |A_rec - A_seed| over matched poles
    double b_square_error = 0.0;
    double max_rho = 0.0;     // over the sampled contour points
};

/// Tabulates q(x, 0) on a uniform grid, runs forward scattering and compares with the seed.
inline RoundTripStudy roundtrip_study(const SolitonSeed& seed, cx eta1, double half_width = 200.0, double h = 0.01,
                                      const SpectrumOptions& opt = {}, int contour_points = 16) {
    std::vector<double> xs, qs;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * half_width / h));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = -half_width + h * static_cast<double>(i);
        xs.push_back(x);
        qs.push_back(q_soliton(seed, x, 0.0).real());
    }
    const InitialDatum d = InitialDatum::from_samples(seed.sigma, seed.q_minus, xs, qs);
    const SpectrumReport rep = find_discrete_spectrum(d, opt);
    RoundTripStudy r;
    r.recovered = rep.eigen;
    r.winding = rep.winding;
    r.eta_error = std::numeric_limits<double>::infinity();
    for (const DiscreteEigen& e : rep.eigen) {
        r.eta_error = std::min({r.eta_error, std::abs(e.eta - eta1), std::abs(e.eta_hat() - eta1)});
        r.b_square_error = std::max(r.b_square_error, std::abs(e.b * e.b - 1.0));
        double best = std::numeric_limits<double>::infinity();
        cx a_seed{};
        for (const SeedPole& p : seed.poles)
            if (std::abs(p.eta - e.eta) < best) {
                best = std::abs(p.eta - e.eta);
                a_seed = p.A;
            }
        r.A_error = std::max(r.A_error, std::abs(e.A - a_seed));
    }
    if (rep.eigen.size() != seed.poles.size()) r.A_error = std::numeric_limits<double>::infinity();
    std::vector<cx> pts;
    for (int j = 0; j < contour_points; ++j) {
        const double u = (j + 0.5) / contour_points;
        const double s = std::tan(0.5 * pi * u);  // (0, inf)
        pts.emplace_back(s, 0.0);
        pts.emplace_back(-s, 0.0);
        pts.push_back(std::polar(1.0, 2.0 * pi * u));
    }
    std::vector<double> mags(pts.size());
    parallel_for(pts.size(), opt.threads, [&](std::size_t k) { mags[k] = std::abs(reflection(d, pts[k], opt.jost).rho); });
    for (double m : mags) r.max_rho = std::max(r.max_rho, m);
    return r;
}

struct JumpNode {
    cx s;
    cx target;        // 1 - rho rho~
    cx delta_ratio;   // delta(s + i eps n) / delta(s - i eps n), n the left normal
    cx T_ratio;
};

struct JumpStudy {
    std::vector<JumpNode> nodes;
    double max_delta_error = 0.0, max_T_error = 0.0;
};

/// Two-sided limits at `per_piece` interior parameters of every piece of Gamma.
inline JumpStudy jump_study(const RhTransforms& rh, int per_piece = 8, double eps = 1e-4, unsigned threads = 0) {
    std::vector<cx> s_nodes, normals;
    for (const Piece& pc : rh.pieces())
        for (int j = 0; j < per_piece; ++j) {
            const double u = (j + 0.5) / per_piece;
            const cx d = pc.ds(u);
            s_nodes.push_back(pc.s(u));
            normals.push_back(I * d / std::abs(d));
        }
    JumpStudy js;
    js.nodes.resize(s_nodes.size());
    parallel_for(s_nodes.size(), threads, [&](std::size_t k) {
        const cx s = s_nodes[k], zp = s + eps * normals[k], zm = s - eps * normals[k];
        JumpNode& n = js.nodes[k];
        n.s = s;
        n.target = 1.0 - rh.data().rho(s) * rh.data().rho_tilde(s);
        n.delta_ratio = rh.delta(zp) / rh.delta(zm);
        n.T_ratio = rh.T(zp) / rh.T(zm);
    });
    for (const JumpNode& n : js.nodes) {
        js.max_delta_error = std::max(js.max_delta_error, std::abs(n.delta_ratio - n.target));
        js.max_T_error = std::max(js.max_T_error, std::abs(n.T_ratio - n.target));
    }
    return js;
}

struct DecayStudy {
    std::vector<double> t, diff;
    std::vector<cx> q_oracle, q_asym;
    double slope = 0.0;
    double diff_floor = 0.0;  // differences below this are replaced by it before the fit
};

/// |q(xi t, t) - T(inf)^-2 q^Lambda| along a ray, with the exact reflectionless solution as oracle.
inline DecayStudy decay_study(const SolitonSeed& seed, double xi, const std::vector<double>& ts,
                              const AsymptoticOptions& opt = {}) {
    const ScatteringData sd = reflectionless_data(seed);
    const AsymptoticPipeline pipe(sd, xi, opt);
    DecayStudy d;
    d.t = ts;
    d.diff_floor = 1e-15;
    for (double t : ts) {
        const cx qo = q_soliton(seed, xi * t, t);
        const cx qa = pipe.evaluate(t).q;
        d.q_oracle.push_back(qo);
        d.q_asym.push_back(qa);
        d.diff.push_back(std::max(std::abs(qo - qa), d.diff_floor));
    }
    d.slope = loglog_slope(d.t, d.diff);
    return d;
}

struct SecondTermStudy {
    std::vector<double> t, modulus;
    double fitted = 0.0, predicted = 0.0;
};

/// Fitted exponent of |sum_i t^{-1/2 + Im nu_i} f_i| against -1/2 + max Im nu(zeta_i).
inline SecondTermStudy second_term_study(const AsymptoticPipeline& pipe, const std::vector<double>& ts) {
    SecondTermStudy s;
    s.t = ts;
    double mx = -std::numeric_limits<double>::infinity();
    for (const PhasePointData& pd : pipe.phase_points()) mx = std::max(mx, pd.nu.imag());
    s.predicted = -0.5 + mx;
    for (double t : ts) s.modulus.push_back(std::abs(pipe.second_term(t, pipe.outer_model(t))));
    s.fitted = loglog_slope(s.t, s.modulus);
    return s;
}

}  // namespace nmkdv
