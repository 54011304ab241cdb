#include "nmkdv/asymptotics.hpp"
#include "nmkdv/validate.hpp"

#include <gtest/gtest.h>

using namespace nmkdv;

TEST(Gamma, KnownValues) {
    EXPECT_NEAR(std::abs(cgamma(5.0) - 24.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(cgamma(0.5) - std::sqrt(pi)), 0.0, 1e-13);
    EXPECT_LT(std::abs(cgamma(cx(1.0, 1.0)) - cx(0.49801566811835604, -0.15494982830181069)), 1e-13);
    // |Gamma(iy)|^2 = pi / (y sinh(pi y))
    for (double y : {0.1, 0.7, 2.0}) {
        EXPECT_NEAR(std::norm(cgamma(cx(0.0, y))), pi / (y * std::sinh(pi * y)), 1e-12 * pi / (y * std::sinh(pi * y)));
        EXPECT_LT(std::abs(rgamma(cx(0.0, y)) * cgamma(cx(0.0, y)) - 1.0), 1e-13);
    }
    EXPECT_EQ(rgamma(0.0), cx(0.0));
    EXPECT_EQ(rgamma(-3.0), cx(0.0));
    EXPECT_THROW(cgamma(-2.0), DomainError);
}

TEST(ParabolicCylinder, VanishingNu) {
    PhasePointData pd;
    pd.nu = 0.0;
    pd.theta2 = 2.0;
    pd.rho_zeta = 0.0;
    pd.rhot_zeta = 0.0;
    const PcCoefficients c = pc_coefficients(pd, 10.0);
    EXPECT_EQ(c.beta12, cx(0.0));
    EXPECT_EQ(c.beta21, cx(0.0));
    EXPECT_EQ(f_term(Mat2::Identity(), pd, c), cx(0.0));
}

TEST(ParabolicCylinder, ProductIsMinusNu) {
    const ScatteringData sd = synthetic_reflection(-1, 1.0, 1.0, 1.0);
    for (cx hook : {cx(1.0), cx(0.3, -2.0)}) {
        AsymptoticOptions o;
        o.rho_hook = hook;
        const AsymptoticPipeline pipe(sd, -8.0, o);
        for (const PhasePointData& pd : pipe.phase_points()) {
            const PcCoefficients c = pc_coefficients(pd, 50.0);
            EXPECT_LT(std::abs(c.beta12_tilde * c.beta21_tilde + pd.nu), 1e-12 * (1 + std::abs(pd.nu)));
            EXPECT_LT(std::abs(c.beta12 * c.beta21 + pd.nu), 1e-12 * (1 + std::abs(pd.nu)));
            EXPECT_NEAR(std::abs(c.beta12 / c.beta12_tilde), std::pow(50.0, pd.nu.imag()), 1e-12);
        }
    }
}

TEST(ErrorExponent, Branches) {
    const ErrorExponent b1 = error_exponent(0.1, 0.05, 0.1);
    EXPECT_EQ(b1.branch, 1);
    EXPECT_NEAR(b1.value, -0.8, 1e-15);
    const ErrorExponent b2 = error_exponent(0.125, -0.05, 0.125);
    EXPECT_EQ(b2.branch, 2);
    EXPECT_NEAR(b2.value, -0.75 + 1.0 / 16.0, 1e-15);
    const ErrorExponent b2b = error_exponent(0.1, -0.15, 0.15);
    EXPECT_EQ(b2b.branch, 2);
    EXPECT_NEAR(b2b.value, -0.7, 1e-15);
    const ErrorExponent b3 = error_exponent(-0.05, -0.2, 0.2);
    EXPECT_EQ(b3.branch, 3);
    EXPECT_EQ(b3.value, -0.75);
    const ErrorExponent zero = error_exponent(0.0, 0.0, 0.0);
    EXPECT_TRUE(zero.boundary);
    EXPECT_EQ(zero.value, -0.75);
    const ErrorExponent out = error_exponent(0.45, -0.45, 0.45);
    EXPECT_EQ(out.branch, 0);
    EXPECT_TRUE(std::isnan(out.value));
    const std::array<double, 6> im{0.1, 0.05, 0.07, 0.08, 0.06, 0.1};
    EXPECT_EQ(error_exponent(im).branch, 1);
}

TEST(Pipeline, RegionChecks) {
    const ScatteringData sd = synthetic_reflection(-1, 1.0, 0.2, 0.1);
    EXPECT_THROW(AsymptoticPipeline(sd, 0.0), OutOfScope);
    EXPECT_THROW(AsymptoticPipeline(sd, 6.05), OutOfScope);
    EXPECT_THROW(AsymptoticPipeline(sd, -5.95), OutOfScope);
    EXPECT_NO_THROW(AsymptoticPipeline(sd, 8.0));
}

TEST(Pipeline, RegionThreeWithoutSpectrum) {
    const ScatteringData sd = synthetic_reflection(-1, 1.0, 0.2, 0.1);
    const AsymptoticPipeline pipe(sd, 8.0);
    EXPECT_EQ(pipe.region(), Region::III);
    for (double t : {10.0, 100.0}) {
        const AsymptoticValue v = pipe.evaluate(t);
        EXPECT_EQ(v.second, cx(0.0));
        EXPECT_LT(std::abs(v.q - sd.q_minus / (pipe.T_inf() * pipe.T_inf())), 1e-14);
        EXPECT_NEAR(v.envelope, 1.0 / t, 1e-15);
    }
    EXPECT_THROW(pipe.evaluate(0.0), DomainError);
}

TEST(Pipeline, RegionOneSecondTermBounded) {
    const ScatteringData sd = synthetic_reflection(-1, 1.0, 1.0, 1.0);
    const AsymptoticPipeline pipe(sd, -8.0);
    EXPECT_EQ(pipe.region(), Region::I);
    for (const PhasePointData& pd : pipe.phase_points()) EXPECT_LT(std::abs(pd.nu.imag()), 0.5);
    for (double t : {10.0, 100.0, 1000.0}) {
        const AsymptoticValue v = pipe.evaluate(t);
        EXPECT_TRUE(std::isfinite(std::abs(v.q)));
        EXPECT_LT(std::abs(v.second), 10.0 * std::pow(t, -0.5 + 0.5));
        EXPECT_LT(std::abs(v.leading - sd.q_minus / (pipe.T_inf() * pipe.T_inf())), 1e-14);
    }
}

TEST(Pipeline, ReflectionlessDecayAlongRay) {
    const SolitonSeed s = reflectionless_seed(-1, 1.0, {cx(0.0, 2.0), cx(0.0, -0.5)}, {1.0, -1.0});
    const DecayStudy d = decay_study(s, 10.0, {1.0, 2.0});
    ASSERT_EQ(d.diff.size(), 2u);
    EXPECT_LT(d.diff[1], d.diff[0]);
    EXPECT_LT(d.slope, -0.85);
}
