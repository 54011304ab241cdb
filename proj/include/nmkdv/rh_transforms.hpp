#pragma once

#include "nmkdv/contour.hpp"
#include "nmkdv/scattering.hpp"
#include "nmkdv/spectral_core.hpp"
#include "nmkdv/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace nmkdv {

enum class PoleKind { Complex, Mirror, Imaginary };

/// Complex: Re eta > 0 off the axis; Mirror: the partner -conj(eta); Imaginary: eta on iR.
inline PoleKind classify_pole(cx eta) {
    if (std::abs(eta.real()) <= 1e-12 * (1.0 + std::abs(eta))) return PoleKind::Imaginary;
    return eta.real() > 0 ? PoleKind::Complex : PoleKind::Mirror;
}

struct SpectrumPartition {
    double delta0 = 0.0;
    double varrho = 0.0;
    std::vector<std::size_t> Delta, Nabla, Lambda;
    std::vector<double> re2itheta;  // Re(2i theta(eta_k)) per pole

    bool in(const std::vector<std::size_t>& set, std::size_t k) const {
        return std::find(set.begin(), set.end(), k) != set.end();
    }
    std::size_t delta2_count(const std::vector<cx>& etas) const {
        std::size_t n = 0;
        for (std::size_t k : Delta) n += classify_pole(etas[k]) == PoleKind::Imaginary;
        return n;
    }
};

/// Half the minimal separation among poles, their images, stationary points and the real axis.
inline double varrho_radius(const std::vector<cx>& etas, const PhaseGeometry& g) {
    std::vector<cx> all;
    for (cx e : etas) {
        all.push_back(e);
        all.push_back(-1.0 / e);
    }
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i) {
        m = std::min(m, std::abs(all[i].imag()));
        for (std::size_t j = i + 1; j < all.size(); ++j) m = std::min(m, std::abs(all[i] - all[j]));
        for (cx zz : g.points) m = std::min(m, std::abs(all[i] - zz));
    }
    return 0.5 * m;
}

/// Splits the poles by the sign of Re(2i theta). delta0 defaults to 0.1 max |Re 2i theta| (floor 1e-3);
/// poles with |Re 2i theta| <= delta0 go to Lambda.
inline SpectrumPartition partition(const std::vector<cx>& etas, double xi, std::optional<double> delta0 = {}) {
    SpectrumPartition p;
    const PhaseGeometry g = stationary_points(xi);
    p.varrho = etas.empty() ? 0.0 : varrho_radius(etas, g);
    double mx = 0.0;
    for (cx e : etas) {
        const double r = re_2it_theta(e, xi, 1.0);
        p.re2itheta.push_back(r);
        mx = std::max(mx, std::abs(r));
    }
    p.delta0 = delta0 ? *delta0 : std::max(0.1 * mx, 1e-3);
    for (std::size_t k = 0; k < etas.size(); ++k) {
        const double r = p.re2itheta[k];
        if (r < 0) p.Delta.push_back(k);
        else if (r > 0) p.Nabla.push_back(k);
        if (std::abs(r) <= p.delta0) p.Lambda.push_back(k);
    }
    return p;
}

/// Oriented pieces of the jump contour with D+ on the left: the real line pieces carrying nu
/// for xi < -6 and the whole of Sigma for xi > 6.
inline std::vector<Piece> gamma_pieces(const PhaseGeometry& g) {
    if (g.region == Region::I) {
        const double z1 = g.zeta(1).real(), z2 = g.zeta(2).real(), z5 = g.zeta(5).real(), z6 = g.zeta(6).real();
        return {Piece::ray_in(cx(z6), cx(-1.0)), Piece::line(cx(z1), cx(0.0)), Piece::line(cx(0.0), cx(z2)),
                Piece::ray_out(cx(z5), cx(1.0))};
    }
    if (g.region == Region::III) {
        return {Piece::ray_in(cx(-1.0), cx(-1.0)), Piece::line(cx(1.0), cx(0.0)), Piece::line(cx(0.0), cx(-1.0)),
                Piece::ray_out(cx(1.0), cx(1.0)), Piece::arc(cx(0.0), 1.0, pi, 0.0),
                Piece::arc(cx(0.0), 1.0, pi, 2.0 * pi)};
    }
    throw OutOfScope("jump contour is only built for xi < -6 or xi > 6 (region " + region_name(g.region) + ")");
}

/// nu = -(1/2pi) log(1 - rho rho~) on the principal branch.
inline cx nu_value(const ScatteringData& sd, cx s) {
    const cx w = 1.0 - sd.rho(s) * sd.rho_tilde(s);
    if (std::abs(w) < 1e-10) throw DomainError("nu: 1 - rho rho~ vanishes, log branch ambiguous");
    return -std::log(w) / (2.0 * pi);
}

/// Scalar transforms nu, delta, T for one xi, built once from scattering data and a pole set.
class RhTransforms {
  public:
    RhTransforms(ScatteringData sd, double xi, const std::vector<cx>& etas, const SpectrumPartition& part,
                 QuadratureOptions opt = {})
        : sd_(std::move(sd)), geom_(stationary_points(xi)), pieces_(gamma_pieces(geom_)), opt_(opt) {
        for (std::size_t k : part.Delta) delta_poles_.push_back(etas[k]);
        for (cx p : delta_poles_)
            if (classify_pole(p) == PoleKind::Imaginary) ++delta2_;
        c0_ = 0.0;
        for (const Piece& pc : pieces_) c0_ += integrate_piece(pc, [this](cx s) { return nu(s) / s; }, opt_);
        nu_total_ = 0.0;
        for (const Piece& pc : pieces_) nu_total_ += integrate_piece(pc, nu_fn(), opt_);
    }

    const PhaseGeometry& geometry() const { return geom_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const ScatteringData& data() const { return sd_; }
    std::size_t delta2_count() const { return delta2_; }
    const std::vector<cx>& delta_poles() const { return delta_poles_; }

    cx nu(cx s) const { return nu_value(sd_, s); }

    /// i * integral over Gamma of nu(s)/(s - z).
    cx cauchy_exponent(cx z) const {
        cx acc = 0.0;
        for (const Piece& pc : pieces_) acc += cauchy_piece(pc, nu_fn(), z, opt_);
        return I * acc;
    }

    cx delta(cx z) const { return std::exp(cauchy_exponent(z)); }

    /// Product over Delta of (p z + 1)/(z - p), with a sign flip for mirror and imaginary poles.
    cx blaschke(cx z) const {
        cx f = 1.0;
        for (cx p : delta_poles_) {
            if (std::abs(z - p) < 1e-8) throw DomainError("T: evaluation at a pole");
            const cx g = (p * z + 1.0) / (z - p);
            f *= classify_pole(p) == PoleKind::Complex ? g : -g;
        }
        return f;
    }

    cx T(cx z) const { return blaschke(z) * std::exp(cauchy_exponent(z) - 0.5 * I * c0_); }

    cx T_inf() const {
        cx f = 1.0;
        for (cx p : delta_poles_) f *= classify_pole(p) == PoleKind::Complex ? p : -p;
        return f * std::exp(-0.5 * I * c0_);
    }

    /// T(z) = T(inf) (1 + T1/z + O(z^-2)).
    cx T1() const {
        cx s = -I * nu_total_;
        for (cx p : delta_poles_) s += p + 1.0 / p;
        return s;
    }

    /// Local branch factor at the stationary point with the cut along the point's own piece of Gamma.
    cx local_factor(int i, cx z) const {
        const cx zi = geom_.zeta(i);
        const cx n = nu(zi);
        switch (i) {
            case 1: return std::exp(-I * n * std::log(z - zi));
            case 2: return std::exp(I * n * std::log(zi - z));
            case 5: return std::exp(-I * n * std::log(zi - z));
            case 6: return std::exp(I * n * std::log(z - zi));
            default: throw DomainError("local_factor: i must be 1, 2, 5 or 6");
        }
    }

    /// Regularized boundary constant T_i(zeta_i) = lim T(z) / local_factor(i, z).
    cx Ti(int i) const {
        if (geom_.region != Region::I) throw OutOfScope("Ti: boundary constants exist for xi < -6 only");
        const std::size_t own = own_piece(i);
        const cx zi = geom_.zeta(i);
        const cx ni = nu(zi);
        cx beta = 0.0;
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            if (j == own) continue;
            beta += cauchy_piece(pieces_[j], nu_fn(), zi, opt_);
        }
        auto reg = [&](cx s) { return (nu(s) - ni) / (s - zi); };
        auto plain = [&](cx s) { return nu(s) / (s - zi); };
        switch (i) {
            case 1:
                beta += integrate_piece(pieces_[own], reg, opt_) + ni * std::log(zi);
                break;
            case 2:
                beta += integrate_piece(pieces_[own], reg, opt_) - ni * std::log(-zi);
                break;
            case 5:
                beta += integrate_piece(Piece::line(zi, zi + 1.0), reg, opt_) +
                        integrate_piece(Piece::ray_out(zi + 1.0, cx(1.0)), plain, opt_);
                break;
            case 6:
                beta += integrate_piece(Piece::ray_in(zi - 1.0, cx(-1.0)), plain, opt_) +
                        integrate_piece(Piece::line(zi - 1.0, zi), reg, opt_);
                break;
            default: break;
        }
        beta -= 0.5 * c0_;
        return blaschke(zi) * std::exp(I * beta);
    }

    /// Real phase generator beta_i with T_i = blaschke(zeta_i) exp(i beta_i).
    cx beta(int i) const { return -I * std::log(Ti(i) / blaschke(geom_.zeta(i))); }

  private:
    ComplexFn nu_fn() const {
        return [this](cx s) { return nu(s); };
    }

    std::size_t own_piece(int i) const {
        switch (i) {
            case 1: return 1;
            case 2: return 2;
            case 5: return 3;
            case 6: return 0;
            default: throw DomainError("Ti: i must be 1, 2, 5 or 6");
        }
    }

    ScatteringData sd_;
    PhaseGeometry geom_;
    std::vector<Piece> pieces_;
    QuadratureOptions opt_;
    std::vector<cx> delta_poles_;
    std::size_t delta2_ = 0;
    cx c0_{}, nu_total_{};
};

}  // namespace nmkdv
