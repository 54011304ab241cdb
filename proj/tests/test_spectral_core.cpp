#include "nmkdv/spectral_core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nmkdv;

namespace {

cx fd_theta1(cx z, double xi, double h = 1e-5) { return (theta(z + h, xi) - theta(z - h, xi)) / (2 * h); }

}  // namespace

TEST(Uniformization, LambdaSquaredMinusKSquared) {
    std::mt19937 g(1);
    std::uniform_real_distribution<double> r(-5, 5);
    for (int i = 0; i < 200; ++i) {
        const cx z(r(g), r(g));
        const Uniformization u = uniformize(z);
        EXPECT_LT(std::abs(u.lambda * u.lambda - u.k * u.k - 1.0), 1e-12 * (1 + std::norm(u.lambda)));
    }
    EXPECT_THROW(uniformize(0.0), DomainError);
}

TEST(Theta, TrivialValues) {
    EXPECT_NEAR(theta(1.0, -8.0).real(), -10.0, 1e-14);
    EXPECT_NEAR(theta(1.0, -8.0).imag(), 0.0, 1e-14);
    for (double xi : {-8.0, 0.0, 3.5, 12.0}) EXPECT_LT(std::abs(theta(I, xi)), 1e-14);
    EXPECT_LT(std::abs(theta(2.0, -8.0) + theta(-0.5, -8.0)), 1e-13);
    EXPECT_THROW(theta(0.0, 1.0), DomainError);
    EXPECT_THROW(theta_derivatives(0.0, 1.0), DomainError);
    EXPECT_THROW(re_2it_theta(0.0, 1.0, 1.0), DomainError);
}

TEST(Theta, SymmetriesOnAnnulus) {
    std::mt19937 g(2);
    std::uniform_real_distribution<double> lr(std::log(0.1), std::log(10.0)), ph(0, 2 * pi), xr(-20, 20);
    for (int i = 0; i < 1000; ++i) {
        const cx z = std::polar(std::exp(lr(g)), ph(g));
        const double xi = xr(g);
        const cx th = theta(z, xi);
        EXPECT_LT(std::abs(theta(-1.0 / z, xi) + th), 1e-12 * (1 + std::abs(th)));
        EXPECT_LT(std::abs(theta(-std::conj(z), xi) + std::conj(th)), 1e-12 * (1 + std::abs(th)));
    }
}

TEST(Theta, DerivativesMatchFiniteDifferences) {
    std::mt19937 g(3);
    std::uniform_real_distribution<double> r(0.3, 3.0), ph(0, 2 * pi);
    for (int i = 0; i < 100; ++i) {
        const cx z = std::polar(r(g), ph(g));
        const double xi = -15 + i * 0.3;
        const ThetaDerivatives d = theta_derivatives(z, xi);
        EXPECT_LT(std::abs(d.d1 - fd_theta1(z, xi)), 1e-6 * (1 + std::abs(d.d1)));
        const double h = 1e-4;
        const cx d2 = (theta_derivatives(z + h, xi).d1 - theta_derivatives(z - h, xi).d1) / (2 * h);
        EXPECT_LT(std::abs(d.d2 - d2), 1e-6 * (1 + std::abs(d.d2)));
    }
}

TEST(Theta, DerivativeZeros) {
    for (double xi : {-30.0, -8.0, 0.0, 10.0}) EXPECT_LT(std::abs(theta_derivatives(1.0, xi).d1), 1e-15);
    // 3w^2 - 8w + 3 = 0 solved independently
    const double w = (8.0 - std::sqrt(28.0)) / 6.0;
    EXPECT_LT(std::abs(theta_derivatives(std::sqrt(w), -8.0).d1), 1e-10);
    EXPECT_LT(std::abs(theta_derivatives(I / std::sqrt(3.0), 10.0).d1), 1e-10);
}

TEST(StationaryPoints, ReferenceRays) {
    const PhaseGeometry g8 = stationary_points(-8.0);
    EXPECT_EQ(g8.region, Region::I);
    EXPECT_NEAR(g8.zeta(5).real(), std::sqrt((8.0 + std::sqrt(28.0)) / 6.0), 1e-14);
    EXPECT_NEAR(g8.zeta(1).real(), std::sqrt((8.0 - std::sqrt(28.0)) / 6.0), 1e-14);
    EXPECT_NEAR(g8.zeta(5).real(), 1.488372, 5e-7);
    EXPECT_NEAR(g8.zeta(1).real(), 0.671875, 5e-7);
    EXPECT_NEAR(g8.zeta(1).real() * g8.zeta(5).real(), 1.0, 1e-14);

    const PhaseGeometry g10 = stationary_points(10.0);
    EXPECT_EQ(g10.region, Region::III);
    EXPECT_NEAR(g10.zeta(5).imag(), std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(g10.zeta(1).imag(), 1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(g10.zeta(1).real(), 0.0, 0.0);

    const PhaseGeometry gb = stationary_points(-6.0);
    EXPECT_EQ(gb.region, Region::Boundary);
    for (cx z : gb.points) EXPECT_NEAR(std::abs(z), 1.0, 1e-15);
    EXPECT_EQ(stationary_points(6.0).region, Region::Boundary);
    EXPECT_EQ(stationary_points(2.0).region, Region::II);
}

TEST(StationaryPoints, InvariantsOverRandomRays) {
    std::mt19937 g(4);
    std::uniform_real_distribution<double> xr(-40, 40);
    for (int i = 0; i < 500; ++i) {
        const double xi = xr(g);
        if (std::abs(std::abs(xi) - 6.0) < 1e-6) continue;
        const PhaseGeometry geo = stationary_points(xi);
        EXPECT_EQ(geo.zeta(3), cx(1.0));
        EXPECT_EQ(geo.zeta(4), cx(-1.0));
        for (cx z : geo.points) EXPECT_LT(std::abs(theta_derivatives(z, xi).d1), 1e-10 * (1 + std::abs(xi)));
        // Vieta on 3w^2 + xi w + 3 with w = z^2
        const cx w1 = geo.zeta(1) * geo.zeta(1), w5 = geo.zeta(5) * geo.zeta(5);
        EXPECT_LT(std::abs(w1 * w5 - 1.0), 1e-12);
        EXPECT_LT(std::abs(w1 + w5 + xi / 3.0), 1e-12 * (1 + std::abs(xi)));
        EXPECT_LT(std::abs(geo.zeta(2) + geo.zeta(1)), 1e-15);
        EXPECT_LT(std::abs(geo.zeta(6) + geo.zeta(5)), 1e-15);
        if (xi < -6) {
            EXPECT_EQ(geo.region, Region::I);
            for (int k : {1, 5}) EXPECT_EQ(geo.zeta(k).imag(), 0.0);
            EXPECT_LT(std::abs(geo.zeta(1)), 1.0);
            EXPECT_GT(std::abs(geo.zeta(5)), 1.0);
            EXPECT_GT(geo.zeta(1).real(), 0.0);
        } else if (xi > 6) {
            EXPECT_EQ(geo.region, Region::III);
            for (int k : {1, 5}) EXPECT_EQ(geo.zeta(k).real(), 0.0);
            EXPECT_LT(std::abs(geo.zeta(1)), 1.0);
            EXPECT_GT(std::abs(geo.zeta(5)), 1.0);
        } else {
            EXPECT_EQ(geo.region, Region::II);
            for (cx z : geo.points) EXPECT_NEAR(std::abs(z), 1.0, 1e-10);
        }
    }
}

TEST(ReTwoITheta, VanishesOnContour) {
    for (double s : {-3.0, -0.4, 0.2, 1.7, 9.0}) EXPECT_EQ(re_2it_theta(s, -8.0, 3.0), 0.0);
    for (int k = 0; k < 16; ++k)
        EXPECT_LT(std::abs(re_2it_theta(std::polar(1.0, 0.1 + k * 0.39), 7.0, 2.0)), 1e-13);
}

TEST(ReTwoITheta, ScalesLinearlyInT) {
    const cx z(1.1, 0.05);
    EXPECT_NEAR(re_2it_theta(z, -8.0, 4.0), 4.0 * re_2it_theta(z, -8.0, 1.0), 1e-13);
    // between zeta5 and 1 above the axis: the sector sign from theta''(zeta5)
    const double th2 = theta_derivatives(stationary_points(-8.0).zeta(5), -8.0).d2.real();
    const int expected = -(th2 > 0 ? 1 : -1) * (z.real() > stationary_points(-8.0).zeta(5).real() ? 1 : -1);
    EXPECT_EQ(re_2it_theta(z, -8.0, 1.0) > 0 ? 1 : -1, expected);
}

TEST(SignatureGrid, SignsAgreeWithDirectEvaluation) {
    const auto s = signature_grid(-8.0, 2.0, 21, 21, -2, 2, -2, 2);
    EXPECT_EQ(s.size(), 21u * 21u - 1u);  // origin skipped
    for (const auto& p : s) {
        if (p.im == 0.0) EXPECT_EQ(p.sign, 0);
        const double r = re_2it_theta(cx(p.re, p.im), -8.0, 2.0);
        if (std::abs(r) > 1e-9) EXPECT_EQ(p.sign, r > 0 ? 1 : -1);
    }
}

TEST(LensSectors, SignBoundsHoldWithPositiveConstant) {
    for (double xi : {-20.0, -8.0, -6.5, 6.5, 10.0, 20.0}) {
        const auto pts = omega_samples(xi);
        ASSERT_FALSE(pts.empty());
        for (const OmegaSample& p : pts) EXPECT_EQ(re_2it_theta(p.z, xi, 1.0) > 0 ? 1 : -1, p.sign) << xi;
        EXPECT_GT(fitted_sign_constant(xi, pts), 0.0) << xi;
    }
    EXPECT_THROW(omega_samples(0.0), OutOfScope);
    EXPECT_DOUBLE_EQ(lens_aperture(0.2), 0.2);
    EXPECT_DOUBLE_EQ(lens_aperture(2.0), pi / 4);
}
