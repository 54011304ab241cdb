#include "nmkdv/asymptotics.hpp"
#include "nmkdv/config.hpp"
#include "nmkdv/io.hpp"
#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/rh_transforms.hpp"
#include "nmkdv/scattering.hpp"
#include "nmkdv/soliton.hpp"
#include "nmkdv/spectral_core.hpp"
#include "nmkdv/validate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace nmkdv;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    int threads = -1;
    std::string out_dir;
};

/// Rethrows with the name of the stage that failed.
template <class F>
auto tagged(const char* module, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const OutOfScope& e) {
        throw OutOfScope(std::string("[") + module + "] " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(std::string("[") + module + "] " + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("[") + module + "] " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("[") + module + "] " + e.what());
    }
}

/// Explicit --out wins; otherwise <out_dir>/<fallback> when --out <dir> was given globally; otherwise stdout.
class Sink {
  public:
    Sink(const Globals& g, const std::string& explicit_path, const std::string& fallback) {
        std::string path = explicit_path;
        if (path.empty() && !g.out_dir.empty()) path = (fs::path(g.out_dir) / fallback).string();
        else if (!path.empty() && !g.out_dir.empty() && fs::path(path).is_relative())
            path = (fs::path(g.out_dir) / path).string();
        if (!path.empty()) {
            if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot write " + path);
            path_ = path;
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    const std::string& path() const { return path_; }

  private:
    std::ofstream file_;
    std::string path_;
};

RunConfig make_config(const Globals& g) {
    RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (g.threads >= 0) set_threads(c, static_cast<unsigned>(g.threads));
    c.validate();
    return c;
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto p = parse_points(s);
    if (p.size() != 1) throw DomainError("expected a,b, got '" + s + "'");
    return {p[0].real(), p[0].imag()};
}

std::vector<cx> etas_of(const ScatteringData& sd) {
    std::vector<cx> e;
    for (const DiscreteEigen& d : sd.discrete) e.push_back(d.eta);
    return e;
}

ScatteringData load_scattering(const std::string& scatter, const std::string& seed, const std::string& synthetic,
                               int sigma, double q_minus) {
    if (!scatter.empty()) return tagged("io", [&] { return scattering_from_json(read_json(scatter)); });
    if (!seed.empty()) return tagged("soliton_solver", [&] { return reflectionless_data(seed_from_json(read_json(seed))); });
    if (!synthetic.empty()) {
        const auto [a, b] = parse_pair(synthetic);
        return tagged("scattering", [&] { return synthetic_reflection(sigma, q_minus, a, b); });
    }
    throw DomainError("missing input: give --scatter, --seed or --synthetic");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal mKdV: phase geometry, scattering, RH transforms, solitons, asymptotics, PDE oracle"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out_dir, "output directory");

    // phase
    double xi = 0.0;
    auto* phase = app.add_subcommand("phase", "stationary points and region");
    phase->add_option("--xi", xi)->required();
    std::string phase_out;
    phase->add_option("--out", phase_out, "output file");

    // signature
    double sig_t = 1.0;
    std::string grid = "101x101", window = "-3,3,-3,3", sig_out;
    auto* sig = app.add_subcommand("signature", "sign table of Re(2 i t theta)");
    sig->add_option("--xi", xi)->required();
    sig->add_option("--t", sig_t);
    sig->add_option("--grid", grid, "<nx>x<ny>");
    sig->add_option("--window", window, "x0,x1,y0,y1");
    sig->add_option("--out", sig_out);

    // scatter
    std::string initial, synthetic, scatter_out;
    int sigma = -1;
    double q_minus = 1.0;
    auto* scat = app.add_subcommand("scatter", "forward scattering of an initial datum");
    auto* scat_init = scat->add_option("--initial", initial, "CSV x,q0 with '# sigma=' and '# q_minus=' headers")
                          ->check(CLI::ExistingFile);
    scat->add_option("--synthetic", synthetic, "a,b of the closed-form reflection profile")->excludes(scat_init);
    scat->add_option("--sigma", sigma);
    scat->add_option("--q-minus", q_minus);
    scat->add_option("--out", scatter_out, "output JSON");

    // transforms
    std::string scatter_in, seed_in, eval_pts, tr_out;
    auto* tr = app.add_subcommand("transforms", "nu, delta and T for one ray");
    tr->add_option("--scatter", scatter_in)->check(CLI::ExistingFile);
    tr->add_option("--seed", seed_in)->check(CLI::ExistingFile);
    tr->add_option("--synthetic", synthetic);
    tr->add_option("--sigma", sigma);
    tr->add_option("--q-minus", q_minus);
    tr->add_option("--xi", xi)->required();
    tr->add_option("--eval", eval_pts, "re,im;re,im;...");
    tr->add_option("--out", tr_out);

    // soliton
    std::string x_range = "-10:10:201", sol_out;
    double sol_t = 0.0;
    auto* sol = app.add_subcommand("soliton", "reflectionless solution on a line of x");
    sol->add_option("--seed", seed_in)->required()->check(CLI::ExistingFile);
    sol->add_option("--x", x_range, "x0:x1:n");
    sol->add_option("--t", sol_t);
    sol->add_option("--out", sol_out);

    // asym
    std::string t_range = "10:100:10", asym_out;
    auto* asym = app.add_subcommand("asym", "long-time expansion along x = xi t");
    asym->add_option("--scatter", scatter_in)->check(CLI::ExistingFile);
    asym->add_option("--seed", seed_in)->check(CLI::ExistingFile);
    asym->add_option("--synthetic", synthetic);
    asym->add_option("--sigma", sigma);
    asym->add_option("--q-minus", q_minus);
    asym->add_option("--xi", xi)->required();
    asym->add_option("--t", t_range, "t0:t1:n");
    asym->add_option("--out", asym_out);

    // evolve
    double ev_t = 1.0, ev_dt = 0.0;
    std::string ev_out;
    auto* ev = app.add_subcommand("evolve", "method-of-lines evolution of the coupled local system");
    ev->add_option("--initial", initial)->required()->check(CLI::ExistingFile);
    ev->add_option("--sigma", sigma)->required();
    ev->add_option("--t", ev_t)->required();
    ev->add_option("--dt", ev_dt, "snapshot interval (default: only the end time)");
    ev->add_option("--out", ev_out, "output CSV t,x,re,im");

    // residual
    std::string field_in, res_out;
    auto* res = app.add_subcommand("residual", "finite-difference residual of a sampled field");
    res->add_option("--field", field_in)->required()->check(CLI::ExistingFile);
    res->add_option("--sigma", sigma);
    res->add_option("--out", res_out);

    // validate
    std::string mode, val_out;
    double vx = 1.0, vt = 0.5;
    bool xi_given = false;
    auto* val = app.add_subcommand("validate", "named checks with a JSON report");
    val->add_option("--mode", mode)->required()->check(CLI::IsMember({"residual", "roundtrip", "jumps", "decay"}));
    val->add_option("--seed", seed_in)->check(CLI::ExistingFile);
    val->add_option("--scatter", scatter_in)->check(CLI::ExistingFile);
    val->add_option("--synthetic", synthetic);
    val->add_option("--sigma", sigma);
    val->add_option("--q-minus", q_minus);
    auto* val_xi = val->add_option("--xi", xi);
    val->add_option("--x", vx);
    val->add_option("--t", vt);
    val->add_option("--out", val_out);

    // --out after a subcommand names a file, before it a directory
    for (auto* sc : {phase, sig, scat, tr, sol, asym, ev, res, val}) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);
    xi_given = val_xi->count() > 0;

    try {
        const RunConfig cfg = make_config(g);

        if (*phase) {
            const PhaseGeometry geo = tagged("spectral_core", [&] { return stationary_points(xi); });
            nlohmann::json pts = nlohmann::json::array();
            for (cx z : geo.points) pts.push_back(to_json(z));
            Sink s(g, phase_out, "phase.json");
            write_json(s.os(), {{"xi", xi}, {"region", region_name(geo.region)}, {"points", pts}});
        } else if (*sig) {
            int nx = 0, ny = 0;
            if (std::sscanf(grid.c_str(), "%dx%d", &nx, &ny) != 2 || nx < 1 || ny < 1)
                throw DomainError("--grid must be <nx>x<ny>");
            double w[4];
            if (std::sscanf(window.c_str(), "%lf,%lf,%lf,%lf", &w[0], &w[1], &w[2], &w[3]) != 4)
                throw DomainError("--window must be x0,x1,y0,y1");
            const auto samples =
                tagged("spectral_core", [&] { return signature_grid(xi, sig_t, nx, ny, w[0], w[1], w[2], w[3]); });
            std::vector<std::vector<double>> rows;
            for (const auto& p : samples) rows.push_back({p.re, p.im, static_cast<double>(p.sign)});
            Sink s(g, sig_out, "signature.csv");
            write_csv(s.os(), {"re", "im", "sign"}, rows);
        } else if (*scat) {
            nlohmann::json j;
            if (!initial.empty()) {
                const InitialDatum d = tagged("scattering", [&] { return read_initial_csv(initial); });
                ContourSamples cs = tagged("scattering", [&] { return sample_contour(d, cfg.sampling); });
                const SpectrumReport rep = tagged("scattering", [&] { return find_discrete_spectrum(d, cfg.spectrum); });
                const ScatteringData sd = from_samples(d, cs, rep.eigen);
                j = scattering_to_json(sd, "samples", {{"winding", rep.winding}, {"newton_roots", rep.newton_roots}});
            } else if (!synthetic.empty()) {
                const auto [a, b] = parse_pair(synthetic);
                const ScatteringData sd = tagged("scattering", [&] { return synthetic_reflection(sigma, q_minus, a, b); });
                j = scattering_to_json(sd, "synthetic", {{"a", a}, {"b", b}});
            } else {
                throw DomainError("missing input: give --initial or --synthetic");
            }
            Sink s(g, scatter_out, "scatter.json");
            write_json(s.os(), j);
        } else if (*tr) {
            const ScatteringData sd = load_scattering(scatter_in, seed_in, synthetic, sigma, q_minus);
            const std::vector<cx> etas = etas_of(sd);
            const SpectrumPartition part = tagged("rh_transforms", [&] { return partition(etas, xi, cfg.delta0); });
            const RhTransforms rh = tagged("rh_transforms", [&] { return RhTransforms(sd, xi, etas, part, cfg.quad); });
            nlohmann::json nus = nlohmann::json::array();
            if (rh.geometry().region == Region::I)
                for (int i : {1, 2, 5, 6}) {
                    const cx z = rh.geometry().zeta(i);
                    nus.push_back({{"index", i}, {"zeta", z.real()}, {"nu", to_json(rh.nu(z))}});
                }
            nlohmann::json samples = nlohmann::json::array();
            for (cx z : parse_points(eval_pts)) {
                const cx d = tagged("rh_transforms", [&] { return rh.delta(z); });
                const cx t = tagged("rh_transforms", [&] { return rh.T(z); });
                samples.push_back({{"z", to_json(z)}, {"delta", to_json(d)}, {"T", to_json(t)}});
            }
            nlohmann::json parts = {{"Delta", part.Delta}, {"Nabla", part.Nabla}, {"Lambda", part.Lambda},
                                    {"delta0", part.delta0}};
            Sink s(g, tr_out, "transforms.json");
            write_json(s.os(), {{"xi", xi},
                                {"region", region_name(rh.geometry().region)},
                                {"nu", nus},
                                {"samples", samples},
                                {"T_inf", to_json(rh.T_inf())},
                                {"T1", to_json(rh.T1())},
                                {"partition", parts}});
        } else if (*sol) {
            const SolitonSeed seed = tagged("soliton_solver", [&] { return seed_from_json(read_json(seed_in)); });
            std::vector<std::vector<double>> rows;
            for (double x : parse_range(x_range)) {
                const cx q = tagged("soliton_solver", [&] { return q_soliton(seed, x, sol_t); });
                rows.push_back({x, q.real(), q.imag()});
            }
            Sink s(g, sol_out, "soliton.csv");
            write_csv(s.os(), {"x", "re", "im"}, rows);
        } else if (*asym) {
            const ScatteringData sd = load_scattering(scatter_in, seed_in, synthetic, sigma, q_minus);
            const AsymptoticOptions opt = asymptotic_options(cfg);
            const auto pipe = tagged("asymptotics", [&] { return std::make_unique<AsymptoticPipeline>(sd, xi, opt); });
            std::vector<std::vector<double>> rows;
            for (double t : parse_range(t_range)) {
                const AsymptoticValue v = tagged("asymptotics", [&] { return pipe->evaluate(t); });
                rows.push_back({t, xi * t, v.q.real(), v.q.imag(), v.envelope});
            }
            Sink s(g, asym_out, "asym.csv");
            write_csv(s.os(), {"t", "x", "re", "im", "envelope"}, rows);
        } else if (*ev) {
            const InitialDatum d = tagged("pde_oracle", [&] { return read_initial_csv(initial); });
            if (d.sigma != sigma) throw DomainError("--sigma disagrees with the sigma header of " + initial);
            CoupledState st = make_coupled_state(d.sigma, d.q_minus, [&d](double x) { return cx(d(x)); },
                                                 cfg.half_width, cfg.h);
            const double step = ev_dt > 0 ? ev_dt : ev_t;
            std::vector<std::vector<double>> rows;
            auto dump = [&](const CoupledState& c) {
                for (std::size_t i = 0; i < c.x.size(); ++i) rows.push_back({c.t, c.x[i], c.u[i].real(), c.u[i].imag()});
            };
            dump(st);
            bool warned = false;
            while (st.t < ev_t - 1e-12) {
                const double t1 = std::min(ev_t, st.t + step);
                const EvolveResult r = tagged("pde_oracle", [&] { return evolve(st, t1, std::min(1e-3, step), cfg.evolve); });
                st = r.state;
                warned = warned || r.edge_warning;
                dump(st);
            }
            if (warned) std::cerr << "warning: energy grew near the window edges\n";
            Sink s(g, ev_out, "evolve.csv");
            write_csv(s.os(), {"t", "x", "re", "im"}, rows);
        } else if (*res) {
            const FieldSeries f = tagged("pde_oracle", [&] { return read_field_csv(field_in); });
            const auto r = tagged("pde_oracle", [&] { return residual_grid(f, sigma); });
            std::vector<std::vector<double>> rows;
            for (const auto& p : r) rows.push_back({p.t, p.x, p.value});
            Sink s(g, res_out, "residual.csv");
            write_csv(s.os(), {"t", "x", "residual"}, rows);
        } else if (*val) {
            Report rep;
            rep.mode = mode;
            if (mode == "residual") {
                const SolitonSeed seed = seed_in.empty() ? imaginary_pair_seed()
                                                         : tagged("io", [&] { return seed_from_json(read_json(seed_in)); });
                const ResidualStudy r = tagged("pde_oracle", [&] { return residual_study(seed, vx, vt, {1e-2, 5e-3, 2.5e-3}); });
                rep.checks.push_back({"residual_order", r.order >= 1.9 && r.order <= 2.1, r.order, 0.1, "order in [1.9, 2.1]"});
                rep.data = {{"x", vx}, {"t", vt}, {"h", r.h}, {"residual", r.residual}};
            } else if (mode == "roundtrip") {
                const cx eta1{0.5, 0.8};
                const SolitonSeed seed = roundtrip_seed(eta1);
                const RoundTripStudy r = tagged("scattering", [&] { return roundtrip_study(seed, eta1, 200.0, 0.01, cfg.spectrum); });
                rep.checks.push_back({"eta1_recovered", r.eta_error < 1e-6, r.eta_error, 1e-6, "|eta - 0.5-0.8i| via eta or eta_hat"});
                rep.checks.push_back({"rho_small", r.max_rho < 1e-5, r.max_rho, 1e-5, "max |rho| on sampled Sigma"});
                rep.checks.push_back({"b_unimodular", r.b_square_error < 1e-6, r.b_square_error, 1e-6, "|b^2 - 1|"});
                rep.checks.push_back({"pole_count", r.winding == 3 && r.recovered.size() == 3,
                                      static_cast<double>(r.winding), 0.0, "winding and Newton roots equal 3"});
                nlohmann::json rec = nlohmann::json::array();
                for (const DiscreteEigen& e : r.recovered) rec.push_back(to_json(e));
                rep.data = {{"recovered", rec}, {"seed", seed_to_json(seed)}, {"A_error", r.A_error}};
            } else if (mode == "jumps") {
                if (!xi_given) xi = -8.0;
                const ScatteringData sd = scatter_in.empty() && seed_in.empty() && synthetic.empty()
                                              ? synthetic_reflection(sigma, q_minus, 1.0, 1.0)
                                              : load_scattering(scatter_in, seed_in, synthetic, sigma, q_minus);
                const std::vector<cx> etas = etas_of(sd);
                const SpectrumPartition part = tagged("rh_transforms", [&] { return partition(etas, xi, cfg.delta0); });
                const RhTransforms rh = tagged("rh_transforms", [&] { return RhTransforms(sd, xi, etas, part, cfg.quad); });
                const JumpStudy js = tagged("rh_transforms", [&] { return jump_study(rh, 8, 1e-4, cfg.threads); });
                rep.checks.push_back({"delta_jump", js.max_delta_error < 1e-4, js.max_delta_error, 1e-4, "delta+/delta- = 1 - rho rho~"});
                rep.checks.push_back({"T_jump", js.max_T_error < 1e-4, js.max_T_error, 1e-4, "T+/T- = 1 - rho rho~"});
                nlohmann::json nodes = nlohmann::json::array();
                for (const JumpNode& n : js.nodes)
                    nodes.push_back({{"s", to_json(n.s)}, {"target", to_json(n.target)}, {"delta", to_json(n.delta_ratio)},
                                     {"T", to_json(n.T_ratio)}});
                rep.data = {{"xi", xi}, {"nodes", nodes}};
            } else {
                if (!xi_given) xi = 10.0;
                const SolitonSeed seed =
                    seed_in.empty() ? reflectionless_seed(-1, 1.0, {cx(0.0, 2.0), cx(0.0, -0.5)}, {1.0, -1.0})
                                    : tagged("io", [&] { return seed_from_json(read_json(seed_in)); });
                const DecayStudy d = tagged("asymptotics", [&] { return decay_study(seed, xi, {5, 10, 20, 40}, asymptotic_options(cfg)); });
                rep.checks.push_back({"decay_slope", d.slope <= -0.85, d.slope, -0.85, "log-log slope of |q - q_asym|"});
                rep.data = {{"xi", xi}, {"t", d.t}, {"diff", d.diff}, {"floor", d.diff_floor}};
            }
            nlohmann::json j = rep.to_json();
            Sink s(g, val_out, "validate_" + mode + ".json");
            write_json(s.os(), j);
            return rep.pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
