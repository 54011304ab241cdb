#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/validate.hpp"

#include <gtest/gtest.h>

using namespace nmkdv;

namespace {

double core_error(const CoupledState& s, const SolitonSeed& seed, double core) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::abs(s.x[i]) <= core) e = std::max(e, std::abs(s.u[i] - q_soliton(seed, s.x[i], s.t)));
    return e;
}

}  // namespace

TEST(Residual, ConstantIsExactlyZero) {
    for (double c : {1.0, -1.0}) {
        auto q = [c](double, double) { return cx(c); };
        for (double h : {1e-1, 1e-2, 1e-3}) EXPECT_EQ(residual(q, -1, 0.3, -0.2, h), 0.0);
    }
}

TEST(Residual, NonSolutionIsNotSmall) {
    // a travelling kink of the wrong speed
    auto q = [](double x, double t) { return cx(std::tanh(x - t)); };
    EXPECT_GT(residual(q, 1, 0.4, 0.1, 1e-3), 1e-2);
}

TEST(Residual, GridVersionAgreesWithPointVersion) {
    const SolitonSeed b = imaginary_pair_seed();
    FieldSeries f;
    const double h = 0.01;
    for (int i = -50; i <= 50; ++i) f.x.push_back(i * h);
    for (int j = -3; j <= 3; ++j) f.t.push_back(j * h);
    for (double t : f.t) {
        std::vector<cx> row;
        for (double x : f.x) row.push_back(q_soliton(b, x, t));
        f.q.push_back(row);
    }
    const auto r = residual_grid(f, b.sigma);
    ASSERT_FALSE(r.empty());
    auto q = [&](double x, double t) { return q_soliton(b, x, t); };
    for (const auto& s : r) {
        EXPECT_NEAR(s.value, residual(q, b.sigma, s.x, s.t, h), 1e-9);
        EXPECT_LT(s.value, 1e-3);
    }
    FieldSeries bad = f;
    for (double& x : bad.x) x += 0.1;
    EXPECT_THROW(residual_grid(bad, -1), DomainError);
}

TEST(CoupledState, MirrorConsistency) {
    auto q0 = [](double x) { return cx(1.0 + 0.3 * std::exp(-(x - 1) * (x - 1))); };
    const CoupledState s = make_coupled_state(-1, 1.0, q0, 10.0, 0.05);
    const std::size_t n = s.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(s.v[i], s.u[n - 1 - i]);
        EXPECT_NEAR(s.x[i], -s.x[n - 1 - i], 1e-12);
    }
}

TEST(Evolve, ConstantBackgroundStaysConstant) {
    const CoupledState s = make_coupled_state(-1, 1.0, [](double) { return cx(1.0); }, 10.0, 0.1);
    const EvolveResult r = evolve(s, 1.0, 1e-3);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        EXPECT_LT(std::abs(r.state.u[i] - 1.0), 1e-10);
        EXPECT_LT(std::abs(r.state.v[i] - 1.0), 1e-10);
    }
    EXPECT_FALSE(r.edge_warning);
    EXPECT_LT(std::abs(r.conserved_start), 1e-12);
}

TEST(Evolve, FourthOrderInSpace) {
    const SolitonSeed b = imaginary_pair_seed();
    std::vector<double> hs{0.2, 0.1}, errs;
    for (double h : hs) {
        const CoupledState s = make_coupled_state(-1, 1.0, [&](double x) { return q_soliton(b, x, 0.0); }, 30.0, h);
        errs.push_back(core_error(evolve(s, 0.2, 1e-3).state, b, 20.0));
    }
    EXPECT_NEAR(loglog_slope(hs, errs), 4.0, 0.3);
}

TEST(Evolve, ConservedQuantityAndMirror) {
    const SolitonSeed b = imaginary_pair_seed();
    const CoupledState s = make_coupled_state(-1, 1.0, [&](double x) { return q_soliton(b, x, 0.0); }, 30.0, 0.1);
    const EvolveResult r = evolve(s, 0.5, 1e-3);
    EXPECT_LT(std::abs(r.conserved_end - r.conserved_start), 1e-6);
    // v tracks q(-x,-t)
    for (std::size_t i = 0; i < r.state.x.size(); i += 10)
        if (std::abs(r.state.x[i]) < 20)
            EXPECT_LT(std::abs(r.state.v[i] - q_soliton(b, -r.state.x[i], -0.5)), 1e-5);
}

TEST(Evolve, PerturbedSolitonStaysBounded) {
    const SolitonSeed b = imaginary_pair_seed();
    const CoupledState s = make_coupled_state(
        -1, 1.0, [&](double x) { return q_soliton(b, x, 0.0) + 0.01 * std::exp(-(x - 3) * (x - 3)); }, 40.0, 0.1);
    const EvolveResult r = evolve(s, 20.0, 1e-2);
    double mx = 0.0;
    for (cx u : r.state.u) mx = std::max(mx, std::abs(u));
    EXPECT_LT(mx, 2.0);
}

TEST(Evolve, BlowUpIsReported) {
    EvolveOptions o;
    o.blowup = 1.5;
    const CoupledState s = make_coupled_state(-1, 1.0, [](double x) { return cx(1.0 + 0.8 * std::exp(-x * x)); }, 10.0, 0.1);
    EXPECT_THROW(evolve(s, 0.1, 1e-3, o), ConvergenceError);
}
