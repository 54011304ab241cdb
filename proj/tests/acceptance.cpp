// One line per acceptance criterion; exit status is the number of failures.
#include "nmkdv/asymptotics.hpp"
#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/rh_transforms.hpp"
#include "nmkdv/scattering.hpp"
#include "nmkdv/soliton.hpp"
#include "nmkdv/spectral_core.hpp"
#include "nmkdv/validate.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace nmkdv;

namespace {

struct Outcome {
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, double budget_s, const char* tol, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = f();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("C%-2d %-4s %-22s value=%.6e tol=%s time=%.2fs/%gs %s\n", id, ok ? "PASS" : "FAIL", name, o.value, tol, dt,
                budget_s, o.detail.c_str());
    std::fflush(stdout);
}

double rel(cx a, cx b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

double rel(const Mat2& a, const Mat2& b) { return (a - b).norm() / std::max(1.0, a.norm()); }

Outcome c1() {
    std::mt19937 g(11);
    std::uniform_real_distribution<double> u(6.0, 20.0);
    double worst_d1 = 0.0, worst_pair = 0.0;
    bool regions = true;
    for (int k = 0; k < 50; ++k) {
        double xi = u(g);
        if (k % 2) xi = -xi;
        if (std::abs(std::abs(xi) - 6.0) < 1e-9) continue;
        const PhaseGeometry geo = stationary_points(xi);
        for (cx z : geo.points) worst_d1 = std::max(worst_d1, std::abs(theta_derivatives(z, xi).d1));
        // zeta1 and zeta5 are exchanged by z -> 1/conj(z)
        worst_pair = std::max(worst_pair, std::abs(geo.zeta(1) * std::conj(geo.zeta(5)) - 1.0));
        if (xi < 0) {
            regions = regions && geo.region == Region::I;
            for (cx z : geo.points) regions = regions && z.imag() == 0.0;
        } else {
            regions = regions && geo.region == Region::III;
            for (int i : {1, 2, 5, 6}) regions = regions && geo.zeta(i).real() == 0.0;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max|theta'|=%.2e pair=%.2e regions=%s", worst_d1, worst_pair, regions ? "ok" : "bad");
    return {worst_d1 < 1e-10 && worst_pair < 1e-12 && regions, std::max(worst_d1, worst_pair), buf};
}

Outcome c2() {
    std::mt19937 g(12);
    std::uniform_real_distribution<double> lr(std::log(0.1), std::log(10.0)), ph(0.0, 2 * pi), xr(-20, 20), ur(0.02, 0.98);
    // theta on an annulus
    double eth = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const cx z = std::polar(std::exp(lr(g)), ph(g));
        const double xi = xr(g);
        const cx th = theta(z, xi);
        eth = std::max({eth, rel(th, -theta(-1.0 / z, xi)), rel(th, -std::conj(theta(-std::conj(z), xi)))});
    }
    // S on Sigma for a Gaussian bump
    const InitialDatum d = InitialDatum::from_function(-1, 1.0, [](double x) { return 1.0 + 0.3 * std::exp(-x * x); }, 8.0);
    Mat2 sQm, sQp;
    sQm << 0.0, d.q_minus, -d.sigma * d.q_plus, 0.0;
    sQp << 0.0, d.q_plus, -d.sigma * d.q_minus, 0.0;
    const Mat2 sQm_inv = sQm.inverse();
    auto S = [&](cx z) {
        const ScatteringCoefficients c = scattering_coefficients(d, z);
        Mat2 m;
        m << c.s11, c.s12, c.s21, c.s22;
        return m;
    };
    std::vector<cx> zs;
    while (zs.size() < 1000) {
        cx z;
        if (zs.size() % 2) z = std::polar(1.0, ph(g));
        else z = std::tan(0.5 * pi * ur(g)) * (zs.size() % 4 ? -1.0 : 1.0);
        if (std::min(std::abs(z - I), std::abs(z + I)) < 0.05) continue;
        zs.push_back(z);
    }
    std::vector<double> es(zs.size());
    parallel_for(zs.size(), 0, [&](std::size_t k) {
        const cx z = zs[k];
        const Mat2 a = S(z);
        es[k] = std::max(rel(a, S(-std::conj(z)).conjugate()), rel(a, sQm_inv * S(-1.0 / z) * sQp));
    });
    double es_max = 0.0;
    for (double e : es) es_max = std::max(es_max, e);
    // T with a symmetric pole set in Delta and nonzero reflection
    const SolitonSeed seed = roundtrip_seed();
    std::vector<cx> etas;
    for (const SeedPole& p : seed.poles) etas.push_back(p.eta);
    const SpectrumPartition part = partition(etas, -8.0);
    const RhTransforms rh(synthetic_reflection(-1, 1.0, 1.0, 1.0), -8.0, etas, part);
    const double sgn = part.Delta.size() % 2 ? -1.0 : 1.0;
    std::vector<cx> tz;
    while (tz.size() < 1000) {
        const cx z = std::polar(std::exp(lr(g)), ph(g));
        bool near = false;
        for (const Piece& pc : rh.pieces())
            for (int j = 0; j <= 64 && !near; ++j) near = std::abs(z - pc.s(j / 64.0)) < 0.05;
        for (cx p : etas) near = near || std::abs(z - p) < 0.05 || std::abs(z + 1.0 / p) < 0.05;
        if (!near) tz.push_back(z);
    }
    std::vector<double> et(tz.size());
    parallel_for(tz.size(), 0, [&](std::size_t k) {
        const cx z = tz[k], t = rh.T(z);
        et[k] = std::max(rel(t, std::conj(rh.T(-std::conj(z)))), std::abs(t * rh.T(-1.0 / z) - sgn));
    });
    double et_max = 0.0;
    for (double e : et) et_max = std::max(et_max, e);
    char buf[160];
    std::snprintf(buf, sizeof buf, "theta=%.2e S=%.2e T=%.2e", eth, es_max, et_max);
    const double worst = std::max({eth, es_max, et_max});
    return {worst < 1e-10, worst, buf};
}

Outcome c3() {
    const InitialDatum d = InitialDatum::from_function(-1, 1.0, [](double x) { return 1.0 + 0.3 * std::exp(-x * x); }, 8.0);
    std::vector<cx> zs;
    for (int k = 0; k < 10; ++k) zs.push_back(cx(0.3 + 0.4 * k) * (k % 2 ? -1.0 : 1.0));
    for (int k = 0; k < 10; ++k) zs.push_back(std::polar(1.0, 0.15 + 0.6 * k));
    std::vector<double> e(zs.size());
    parallel_for(zs.size(), 0, [&](std::size_t k) {
        e[k] = std::max(det_deviation(d, zs[k], 1), det_deviation(d, zs[k], -1));
    });
    double worst = 0.0;
    for (double v : e) worst = std::max(worst, v);
    return {worst < 1e-7, worst, "20 z on Sigma, both sides"};
}

Outcome c4() {
    const ScatteringData s1 = synthetic_reflection(-1, 1.0, 1.0, 1.0);
    const JumpStudy j1 = jump_study(RhTransforms(s1, -8.0, {}, partition({}, -8.0)));
    const ScatteringData s3 = synthetic_reflection(-1, 1.0, 0.2, 0.1);
    const JumpStudy j3 = jump_study(RhTransforms(s3, 8.0, {}, partition({}, 8.0)));
    const double worst = std::max({j1.max_delta_error, j1.max_T_error, j3.max_delta_error, j3.max_T_error});
    char buf[160];
    std::snprintf(buf, sizeof buf, "xi=-8 nodes=%zu delta=%.2e T=%.2e; xi=8 nodes=%zu delta=%.2e T=%.2e", j1.nodes.size(),
                  j1.max_delta_error, j1.max_T_error, j3.nodes.size(), j3.max_delta_error, j3.max_T_error);
    return {worst < 1e-4 && j1.nodes.size() == 32, worst, buf};
}

Outcome c5() {
    const cx eta1(0.5, 0.8);
    const RoundTripStudy r = roundtrip_study(roundtrip_seed(eta1), eta1);
    char buf[128];
    std::snprintf(buf, sizeof buf, "eta_err=%.2e max|rho|=%.2e winding=%d", r.eta_error, r.max_rho, r.winding);
    return {r.eta_error < 1e-6 && r.max_rho < 1e-5, r.eta_error, buf};
}

Outcome c6() {
    const ResidualStudy r = residual_study(imaginary_pair_seed(), 1.0, 0.5, {1e-2, 5e-3, 2.5e-3});
    char buf[128];
    std::snprintf(buf, sizeof buf, "residuals=%.2e,%.2e,%.2e", r.residual[0], r.residual[1], r.residual[2]);
    return {r.order >= 1.9 && r.order <= 2.1, r.order, buf};
}

Outcome c7() {
    const SolitonSeed b = imaginary_pair_seed();
    const double L = 60.0, core = 40.0;
    const CoupledState s = make_coupled_state(b.sigma, b.q_minus, [&](double x) { return q_soliton(b, x, 0.0); }, L, 0.1);
    const EvolveResult r = evolve(s, 5.0, 1e-3);
    double err = 0.0;
    for (std::size_t i = 0; i < r.state.x.size(); ++i)
        if (std::abs(r.state.x[i]) <= core) err = std::max(err, std::abs(r.state.u[i] - q_soliton(b, r.state.x[i], 5.0)));
    char buf[96];
    std::snprintf(buf, sizeof buf, "L=%g h=0.1 core=|x|<=%g steps=%zu", L, core, r.steps);
    return {err < 1e-4, err, buf};
}

Outcome c8() {
    const SolitonSeed a = reflectionless_seed(-1, 1.0, {cx(0.0, 2.0), cx(0.0, -0.5)}, {1.0, -1.0});
    const DecayStudy d = decay_study(a, 10.0, {5, 10, 20, 40});
    char buf[128];
    std::snprintf(buf, sizeof buf, "diff=%.2e,%.2e,%.2e,%.2e floor=%.0e", d.diff[0], d.diff[1], d.diff[2], d.diff[3],
                  d.diff_floor);
    return {d.slope <= -0.85, d.slope, buf};
}

Outcome c9() {
    const AsymptoticPipeline pipe(synthetic_reflection(-1, 1.0, 8.0, 8.0), -8.0);
    std::vector<double> ts;
    for (int k = 0; k < 9; ++k) ts.push_back(10.0 * std::pow(100.0, k / 8.0));
    const SecondTermStudy s = second_term_study(pipe, ts);
    char buf[96];
    std::snprintf(buf, sizeof buf, "fitted=%.4f predicted=%.4f", s.fitted, s.predicted);
    return {std::abs(s.fitted - s.predicted) <= 0.1, s.fitted - s.predicted, buf};
}

Outcome c10() {
    struct Row {
        double a, b, c, expect;
        int branch;
    };
    const Row rows[] = {{0.1, 0.05, 0.1, -0.8, 1},   {0.2, -0.05, 0.2, -0.6, 1},          {0.125, -0.05, 0.125, -0.6875, 2},
                        {0.1, -0.15, 0.15, -0.7, 2}, {-0.05, -0.2, 0.2, -0.75, 3}};
    double worst = 0.0;
    bool ok = true;
    for (const Row& r : rows) {
        const ErrorExponent e = error_exponent(r.a, r.b, r.c);
        ok = ok && e.branch == r.branch;
        worst = std::max(worst, std::abs(e.value - r.expect));
    }
    return {ok && worst <= 1e-15, worst, "5 triples over branches 1-3"};
}

}  // namespace

int main() {
    run(1, "phase_geometry", 1.0, "1e-10/1e-12", c1);
    run(2, "symmetries", 5.0, "1e-10", c2);
    run(3, "determinant", 30.0, "1e-7", c3);
    run(4, "jumps", 60.0, "1e-4", c4);
    run(5, "round_trip", 120.0, "1e-6/1e-5", c5);
    run(6, "residual_order", 30.0, "[1.9,2.1]", c6);
    run(7, "oracle_tracking", 300.0, "1e-4", c7);
    run(8, "region3_decay", 1800.0, "<=-0.85", c8);
    run(9, "second_term", 600.0, "+-0.1", c9);
    run(10, "error_exponent", 1.0, "1e-15", c10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
