#pragma once

#include "nmkdv/types.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nmkdv {

struct Uniformization {
    cx z, k, lambda;
};

inline Uniformization uniformize(cx z) {
    if (z == cx(0.0)) throw DomainError("uniformize: z = 0");
    return {z, 0.5 * (z - 1.0 / z), 0.5 * (z + 1.0 / z)};
}

enum class Region { I, II, III, Boundary };

inline std::string region_name(Region r) {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
        default: return "boundary";
    }
}

/// theta(z) = (z + 1/z)/2 * [xi - 2 + (z - 1/z)^2]
inline cx theta(cx z, double xi) {
    if (z == cx(0.0)) throw DomainError("theta: z = 0");
    const cx zi = 1.0 / z;
    return 0.5 * (z * z * z + (xi - 3.0) * z + (xi - 3.0) * zi + zi * zi * zi);
}

struct ThetaDerivatives {
    cx d1, d2;
};

inline ThetaDerivatives theta_derivatives(cx z, double xi) {
    if (z == cx(0.0)) throw DomainError("theta_derivatives: z = 0");
    const cx z2 = z * z;
    const cx d1 = -(1.0 - z2) * (3.0 * z2 * z2 + xi * z2 + 3.0) / (2.0 * z2 * z2);
    const cx zi = 1.0 / z;
    const cx zi2 = zi * zi;
    const cx d2 = 3.0 * z + (xi - 3.0) * zi2 * zi + 6.0 * zi2 * zi2 * zi;
    return {d1, d2};
}

/// Re(2 i t theta(z)) = -2 t Im theta(z).
inline double re_2it_theta(cx z, double xi, double t) {
    if (z == cx(0.0)) throw DomainError("re_2it_theta: z = 0");
    return -2.0 * t * theta(z, xi).imag();
}

/// The six zeros of theta'. Labels follow the real picture of xi < -6:
/// points[0] = zeta1 and points[1] = zeta2 = -zeta1 inside the unit circle,
/// points[2] = 1, points[3] = -1, points[4] = zeta5 = 1/zeta1 and
/// points[5] = zeta6 = -zeta5 outside it.
struct PhaseGeometry {
    double xi = 0.0;
    std::array<cx, 6> points{};
    Region region = Region::II;

    cx zeta(int i) const { return points.at(static_cast<std::size_t>(i - 1)); }
};

inline constexpr double kBoundaryTol = 1e-12;

inline PhaseGeometry stationary_points(double xi) {
    PhaseGeometry g;
    g.xi = xi;
    const double disc = xi * xi - 36.0;
    cx w_in, w_out;  // roots of 3w^2 + xi w + 3 = 0, w = z^2, |w_in| <= 1 <= |w_out|
    if (std::abs(std::abs(xi) - 6.0) <= kBoundaryTol) {
        g.region = Region::Boundary;
        w_in = w_out = cx(-xi / 6.0 > 0 ? 1.0 : -1.0);
    } else if (disc > 0) {
        g.region = xi < 0 ? Region::I : Region::III;
        const double s = std::sqrt(disc);
        // larger-magnitude root first, the partner from the product w_in * w_out = 1
        const double big = (-xi + (xi < 0 ? s : -s)) / 6.0;
        w_out = cx(big);
        w_in = cx(1.0 / big);
    } else {
        g.region = Region::II;
        const double s = std::sqrt(-disc);
        w_out = cx(-xi / 6.0, s / 6.0);
        w_in = cx(-xi / 6.0, -s / 6.0);
    }
    auto root = [&](cx w) {
        if (g.region == Region::III || (g.region == Region::Boundary && xi > 0))
            return cx(0.0, std::sqrt(std::abs(w)));
        return std::sqrt(w);
    };
    const cx z1 = root(w_in);
    const cx z5 = root(w_out);
    g.points = {z1, -z1, cx(1.0), cx(-1.0), z5, -z5};
    return g;
}

struct SignatureSample {
    double re, im;
    int sign;
};

/// Sign of Re(2 i t theta) on a rectangular grid; points closer than 1e-12 to z = 0 are skipped.
inline std::vector<SignatureSample> signature_grid(double xi, double t, int nx, int ny, double x0,
                                                   double x1, double y0, double y1) {
    std::vector<SignatureSample> out;
    out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        const double y = ny > 1 ? y0 + (y1 - y0) * j / (ny - 1) : y0;
        for (int i = 0; i < nx; ++i) {
            const double x = nx > 1 ? x0 + (x1 - x0) * i / (nx - 1) : x0;
            const cx z(x, y);
            if (std::abs(z) < 1e-12) continue;
            const double r = re_2it_theta(z, xi, t);
            const double tol = 1e-12 * t * (1.0 + std::abs(theta(z, xi)));
            out.push_back({x, y, std::abs(r) <= tol ? 0 : (r > 0 ? 1 : -1)});
        }
    }
    return out;
}

/// Lower bounds of |Re(2i theta)| on the lens sectors next to the real axis.
enum class SignWeight {
    SinRadial,      // |sin w| (1/|z| - |z|)
    Quadratic,      // v^2
    UnitQuadratic,  // |1 - |z|^-2| v^2
    Linear,         // |v|
    UnitLinear,     // |1 - |z|^-2| |v|
};

inline double sign_weight(SignWeight w, cx z) {
    const double r = std::abs(z), v = std::abs(z.imag());
    switch (w) {
        case SignWeight::SinRadial: return std::abs(std::sin(std::arg(z))) * std::abs(1.0 / r - r);
        case SignWeight::Quadratic: return v * v;
        case SignWeight::UnitQuadratic: return std::abs(1.0 - 1.0 / (r * r)) * v * v;
        case SignWeight::Linear: return v;
        default: return std::abs(1.0 - 1.0 / (r * r)) * v;
    }
}

/// A point of a lens sector with the expected sign of Re(2i theta) and the weight it dominates.
struct OmegaSample {
    cx z;
    int sign;
    SignWeight weight;
    double apex;
};

inline double lens_aperture(double theta0) { return std::min(theta0, pi / 4.0); }

/// Points of the triangular sectors {u in (u0, u1), |v| < tan(phi) |u - apex|} that tile both sides of
/// the real axis between consecutive stationary points (and 0). The expected sign at apex p is
/// -sign(theta''(p)) sign(u - p) sign(v), and sign(v) for the sectors opening at 0.
inline std::vector<OmegaSample> omega_samples(double xi, double theta0 = 0.2, int n = 12) {
    const PhaseGeometry g = stationary_points(xi);
    struct Tri {
        double u0, u1, apex;
        SignWeight w;
    };
    std::vector<Tri> tris;
    if (g.region == Region::I) {
        const double a = g.zeta(1).real(), b = g.zeta(5).real();
        tris = {{0.0, a / 2, 0.0, SignWeight::SinRadial},      {a / 2, a, a, SignWeight::Quadratic},
                {a, (a + 1) / 2, a, SignWeight::Quadratic},    {(a + 1) / 2, 1.0, 1.0, SignWeight::UnitQuadratic},
                {1.0, (1 + b) / 2, 1.0, SignWeight::UnitQuadratic}, {(1 + b) / 2, b, b, SignWeight::Quadratic},
                {b, b + 2.0, b, SignWeight::Quadratic}};
    } else if (g.region == Region::III) {
        tris = {{0.0, 0.5, 0.0, SignWeight::Linear}, {0.5, 1.0, 1.0, SignWeight::UnitLinear},
                {1.0, 3.0, 1.0, SignWeight::UnitLinear}};
    } else {
        throw OutOfScope("omega_samples: lens sectors exist for xi < -6 or xi > 6 only");
    }
    const double tp = std::tan(lens_aperture(theta0));
    std::vector<OmegaSample> out;
    for (const Tri& tr : tris)
        for (int mirror : {1, -1})
            for (int i = 0; i < n; ++i) {
                const double u = tr.u0 + (tr.u1 - tr.u0) * (i + 0.5) / n;
                const double vmax = tp * std::abs(u - tr.apex);
                for (int j = 0; j < n; ++j)
                    for (int vs : {1, -1}) {
                        const double v = vs * vmax * (j + 0.5) / n;
                        const cx z(mirror * u, v);
                        int sign = vs;
                        if (tr.apex != 0.0) {
                            const double p = mirror * tr.apex;
                            const double th2 = theta_derivatives(cx(p), xi).d2.real();
                            sign = -(th2 > 0 ? 1 : -1) * (z.real() > p ? 1 : -1) * vs;
                        }
                        out.push_back({z, sign, tr.w, mirror * tr.apex});
                    }
            }
    return out;
}

/// Largest c with sign Re(2i theta) >= c weight on every sample; negative when some sample violates the sign.
inline double fitted_sign_constant(double xi, const std::vector<OmegaSample>& pts) {
    double c = std::numeric_limits<double>::infinity();
    for (const OmegaSample& p : pts) {
        const double w = sign_weight(p.weight, p.z);
        if (w <= 0) continue;
        c = std::min(c, p.sign * re_2it_theta(p.z, xi, 1.0) / w);
    }
    return c;
}

}  // namespace nmkdv
