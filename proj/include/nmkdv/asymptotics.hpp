#pragma once

#include "nmkdv/gamma.hpp"
#include "nmkdv/rh_transforms.hpp"
#include "nmkdv/soliton.hpp"
#include "nmkdv/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nmkdv {

struct PhasePointData {
    int index = 1;
    double zeta = 0.0;
    cx nu{};
    double theta2 = 0.0;
    cx Ti{};
    cx rho_zeta{}, rhot_zeta{};
};

/// rho_zeta = rho(zeta) T_i^-2 * hook, rho~_zeta = rho~(zeta) T_i^2 / hook.
inline PhasePointData phase_point_data(const RhTransforms& rh, int i, cx hook = 1.0) {
    PhasePointData pd;
    pd.index = i;
    const cx z = rh.geometry().zeta(i);
    pd.zeta = z.real();
    pd.nu = rh.nu(z);
    if (std::abs(pd.nu.imag()) >= 0.5) throw DomainError("phase point: |Im nu| must stay below 1/2");
    pd.theta2 = theta_derivatives(z, rh.geometry().xi).d2.real();
    if (std::abs(pd.theta2) <= 1e-8) throw DomainError("phase point: degenerate theta''");
    pd.Ti = rh.Ti(i);
    pd.rho_zeta = rh.data().rho(z) / (pd.Ti * pd.Ti) * hook;
    pd.rhot_zeta = rh.data().rho_tilde(z) * pd.Ti * pd.Ti / hook;
    return pd;
}

struct PcCoefficients {
    cx beta12, beta21;              // t-dependent
    cx beta12_tilde, beta21_tilde;  // t-independent
};

/// beta12 = t^{Im nu} beta12~ and beta21 = t^{-Im nu} beta21~.
inline PcCoefficients pc_coefficients(const PhasePointData& pd, double t) {
    PcCoefficients c{};
    const cx nu = pd.nu;
    if (std::abs(nu) < 1e-300) return c;  // 1/Gamma(0) = 0
    const cx pre = std::sqrt(2.0 * pi) * std::exp(-0.5 * pi * nu);
    if (std::abs(pd.rho_zeta) < 1e-300 || std::abs(pd.rhot_zeta) < 1e-300)
        throw DomainError("pc_coefficients: vanishing rho at a phase point with nonzero nu");
    c.beta12_tilde = -pre * std::exp(I * (pi / 4.0)) * rgamma(-I * nu) / pd.rho_zeta;
    c.beta21_tilde = pre * std::exp(-I * (pi / 4.0)) * rgamma(I * nu) / pd.rhot_zeta;
    c.beta12 = std::pow(t, nu.imag()) * c.beta12_tilde;
    c.beta21 = std::pow(t, -nu.imag()) * c.beta21_tilde;
    return c;
}

/// f_i = (m11^2 beta12~ - m12^2 beta21~) / (2 sqrt(theta'') det m).
inline cx f_term(const Mat2& m, const PhasePointData& pd, const PcCoefficients& c) {
    const cx det = m.determinant();
    if (std::abs(det) < 1e-12) throw DomainError("f_term: det m nearly singular at the phase point");
    const cx root = std::sqrt(cx(pd.theta2, 0.0));
    return (m(0, 0) * m(0, 0) * c.beta12_tilde - m(0, 1) * m(0, 1) * c.beta21_tilde) / (2.0 * root * det);
}

struct ErrorExponent {
    double value = std::numeric_limits<double>::quiet_NaN();
    int branch = 0;  // 1..3, 0 when outside the table
    bool boundary = false;
    std::string note;
};

/// Exponent of the remainder from a = max Im nu, b = min Im nu, c = max |Im nu|.
inline ErrorExponent error_exponent(double a, double b, double c) {
    const double e = 1e-12;
    auto eq = [e](double u, double v) { return std::abs(u - v) <= e; };
    ErrorExponent r;
    if ((0 < b && b <= a + e && eq(a, c) && c < 0.5) ||
        (-1.0 / 6.0 < 2 * a - 0.5 && 2 * a - 0.5 < b && b < 0 && 0 < a && eq(a, c) && c < 0.5)) {
        r.value = -1.0 + a + c;
        r.branch = 1;
    } else if ((a / 2 - 0.25 < b && b < 0 && 0 < a && eq(a, c) && c <= 1.0 / 6.0 + e) ||
               (a / 2 - 0.25 < b && b < 0 && 0 < a && a < c && eq(c, -b) && c < 0.5)) {
        r.value = -0.75 + a / 2;
        r.branch = 2;
    } else if (-0.25 < b && b <= a + e && a < 0 && 0 < c && eq(c, -b) && c < 0.5) {
        r.value = -0.75;
        r.branch = 3;
    } else if (std::abs(a) <= e && std::abs(b) <= e && std::abs(c) <= e) {
        r.value = -0.75;
        r.branch = 3;
        r.boundary = true;
        r.note = "all Im nu vanish: closure of branch 3";
    } else {
        r.note = "outside tabulated branches";
    }
    return r;
}

inline ErrorExponent error_exponent(const std::array<double, 6>& im_nu) {
    double a = -std::numeric_limits<double>::infinity(), b = std::numeric_limits<double>::infinity(), c = 0.0;
    for (double v : im_nu) {
        a = std::max(a, v);
        b = std::min(b, v);
        c = std::max(c, std::abs(v));
    }
    return error_exponent(a, b, c);
}

inline SolitonSeed seed_from(const ScatteringData& sd) {
    SolitonSeed s{sd.sigma, sd.q_minus, {}};
    for (const DiscreteEigen& e : sd.discrete) s.poles.push_back({e.eta, e.A});
    return s;
}

struct AsymptoticValue {
    cx q{};
    cx leading{};  // T(inf)^-2 q^Lambda
    cx second{};   // sum_i t^{-1/2 + Im nu_i} f_i
    cx q_lambda{};
    double envelope = 0.0;
    ErrorExponent exponent;
    Region region = Region::I;
};

struct AsymptoticOptions {
    cx rho_hook = 1.0;
    std::optional<double> delta0;
    double region_margin = 0.1;
    QuadratureOptions quad{};
};

/// Long-time expansion along a fixed ray x = xi t, for xi < -6 or xi > 6.
class AsymptoticPipeline {
  public:
    AsymptoticPipeline(const ScatteringData& sd, double xi, AsymptoticOptions opt = {})
        : xi_(xi), opt_(opt), seed_(seed_from(sd)) {
        if (std::abs(std::abs(xi) - 6.0) <= opt.region_margin)
            throw OutOfScope("xi within " + std::to_string(opt.region_margin) + " of the region boundary |xi| = 6");
        const PhaseGeometry g = stationary_points(xi);
        if (g.region == Region::II) throw OutOfScope("region II (-6 < xi < 6) is not covered");
        for (const SeedPole& p : seed_.poles) etas_.push_back(p.eta);
        part_ = partition(etas_, xi, opt.delta0);
        rh_ = std::make_shared<RhTransforms>(sd, xi, etas_, part_, opt.quad);
        region_ = g.region;
        outer_.seed = &seed_;
        outer_.lambda = part_.Lambda;
        outer_.in_delta.assign(etas_.size(), false);
        for (std::size_t k : part_.Delta) outer_.in_delta[k] = true;
        auto rh = rh_;
        outer_.T = [rh](cx z) { return rh->T(z); };
        outer_.kappa = (rh_->delta2_count() % 2 == 0 ? 1.0 : -1.0) * sd.q_minus;
        t_inf_ = rh_->T_inf();
        if (region_ == Region::I) {
            for (int j = 0; j < 4; ++j) pts_[static_cast<std::size_t>(j)] = phase_point_data(*rh_, kIdx[j], opt.rho_hook);
            std::array<double, 6> im{};
            for (int i = 1; i <= 6; ++i) im[static_cast<std::size_t>(i - 1)] = rh_->nu(g.zeta(i)).imag();
            exponent_ = error_exponent(im);
        } else {
            exponent_.value = -1.0;
            exponent_.branch = 0;
            exponent_.note = "region III";
        }
    }

    AsymptoticPipeline(const AsymptoticPipeline&) = delete;
    AsymptoticPipeline& operator=(const AsymptoticPipeline&) = delete;

    const RhTransforms& transforms() const { return *rh_; }
    const SpectrumPartition& spectrum_partition() const { return part_; }
    const SolitonSeed& seed() const { return seed_; }
    const std::array<PhasePointData, 4>& phase_points() const { return pts_; }
    const ErrorExponent& exponent() const { return exponent_; }
    Region region() const { return region_; }
    cx T_inf() const { return t_inf_; }
    double kappa() const { return outer_.kappa; }

    RationalSolution outer_model(double t) const { return solve_outer_model(outer_, xi_ * t, t); }

    /// sum over the four phase points of t^{-1/2 + Im nu_i} f_i; zero outside region I.
    cx second_term(double t, const RationalSolution& m) const {
        if (region_ != Region::I) return 0.0;
        cx s = 0.0;
        for (const PhasePointData& pd : pts_) {
            const PcCoefficients c = pc_coefficients(pd, t);
            s += std::pow(t, -0.5 + pd.nu.imag()) * f_term(m.eval(cx(pd.zeta)), pd, c);
        }
        return s;
    }

    AsymptoticValue evaluate(double t) const {
        if (!(t > 0)) throw DomainError("q_asymptotic: t must be positive");
        AsymptoticValue v;
        v.region = region_;
        const RationalSolution m = outer_model(t);
        v.q_lambda = m.q();
        const cx ti2 = 1.0 / (t_inf_ * t_inf_);
        v.leading = ti2 * v.q_lambda;
        v.second = second_term(t, m);
        v.q = ti2 * (v.q_lambda - I * v.second);
        v.exponent = exponent_;
        v.envelope = std::isfinite(exponent_.value) ? std::pow(t, exponent_.value) : std::numeric_limits<double>::quiet_NaN();
        return v;
    }

  private:
    static constexpr std::array<int, 4> kIdx{1, 2, 5, 6};
    double xi_;
    AsymptoticOptions opt_;
    SolitonSeed seed_;
    std::vector<cx> etas_;
    SpectrumPartition part_;
    std::shared_ptr<RhTransforms> rh_;
    Region region_ = Region::I;
    OuterModelInput outer_;
    cx t_inf_{};
    std::array<PhasePointData, 4> pts_{};
    ErrorExponent exponent_;
};

}  // namespace nmkdv
