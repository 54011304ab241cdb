#pragma once

#include "nmkdv/asymptotics.hpp"
#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/scattering.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace nmkdv {

struct RunConfig {
    QuadratureOptions quad{};
    JostOptions jost{};
    SamplingOptions sampling{};
    SpectrumOptions spectrum{};
    EvolveOptions evolve{};
    double half_width = 40.0;  // evolve window
    double h = 0.05;
    double theta0 = 0.2;
    std::optional<double> delta0;  // unset: 0.1 max |Re 2i theta|, floor 1e-3
    cx rho_hook = 1.0;
    double region_margin = 0.1;
    unsigned threads = 0;
    std::string out_dir = ".";

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0)) throw DomainError(std::string("config: ") + name + " must be positive");
        };
        auto pow2 = [](std::size_t n, const char* name) {
            if (n == 0 || (n & (n - 1)) != 0) throw DomainError(std::string("config: ") + name + " must be a power of two");
        };
        pos(quad.tol, "quadrature.tol");
        pos(quad.near_factor, "quadrature.near_factor");
        if (!(quad.abs_tol >= 0)) throw DomainError("config: quadrature.abs_tol must be non-negative");
        pos(jost.rtol, "ode.rtol");
        pos(jost.atol, "ode.atol");
        pos(jost.regular_radius, "ode.regular_radius");
        pos(spectrum.newton_tol, "roots.newton_tol");
        pos(spectrum.margin, "roots.margin");
        pos(evolve.rtol, "evolve.rtol");
        pos(evolve.atol, "evolve.atol");
        pos(half_width, "window.half_width");
        pos(h, "window.h");
        pos(theta0, "theta0");
        pos(region_margin, "region_margin");
        if (delta0) pos(*delta0, "delta0");
        pow2(sampling.line_nodes, "contour.line_nodes");
        pow2(sampling.quarter_nodes, "contour.quarter_nodes");
    }
};

namespace detail {

template <class T>
void take(const nlohmann::json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace detail

/// Unknown keys are ignored; missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    using detail::take;
    if (j.contains("quadrature")) {
        const auto& q = j["quadrature"];
        take(q, "tol", c.quad.tol);
        take(q, "abs_tol", c.quad.abs_tol);
        take(q, "max_depth", c.quad.max_depth);
        take(q, "near_factor", c.quad.near_factor);
    }
    if (j.contains("ode")) {
        const auto& o = j["ode"];
        take(o, "rtol", c.jost.rtol);
        take(o, "atol", c.jost.atol);
        take(o, "regular_radius", c.jost.regular_radius);
    }
    if (j.contains("roots")) {
        const auto& r = j["roots"];
        take(r, "newton_tol", c.spectrum.newton_tol);
        take(r, "radius", c.spectrum.radius);
        take(r, "margin", c.spectrum.margin);
        take(r, "grid_r", c.spectrum.grid_r);
        take(r, "grid_phi", c.spectrum.grid_phi);
        take(r, "b_window", c.spectrum.b_window);
    }
    if (j.contains("contour")) {
        const auto& s = j["contour"];
        take(s, "line_nodes", c.sampling.line_nodes);
        take(s, "quarter_nodes", c.sampling.quarter_nodes);
        take(s, "cutoff", c.sampling.cutoff);
    }
    if (j.contains("window")) {
        take(j["window"], "half_width", c.half_width);
        take(j["window"], "h", c.h);
    }
    if (j.contains("evolve")) {
        const auto& e = j["evolve"];
        take(e, "rtol", c.evolve.rtol);
        take(e, "atol", c.evolve.atol);
        take(e, "ramp_width", c.evolve.ramp_width);
        take(e, "blowup", c.evolve.blowup);
    }
    take(j, "theta0", c.theta0);
    if (j.contains("delta0") && !j["delta0"].is_null()) c.delta0 = j["delta0"].get<double>();
    if (j.contains("rho_hook")) {
        const auto& h = j["rho_hook"];
        c.rho_hook = cx(h.at(0).get<double>(), h.at(1).get<double>());
    }
    take(j, "region_margin", c.region_margin);
    take(j, "threads", c.threads);
    take(j, "out_dir", c.out_dir);
    c.sampling.jost = c.jost;
    c.spectrum.jost = c.jost;
    c.sampling.threads = c.spectrum.threads = c.threads;
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return config_from_json(nlohmann::json::parse(in));
}

/// Applies the thread count everywhere it is consumed.
inline void set_threads(RunConfig& c, unsigned threads) {
    c.threads = threads;
    c.sampling.threads = threads;
    c.spectrum.threads = threads;
}

inline AsymptoticOptions asymptotic_options(const RunConfig& c) {
    AsymptoticOptions o;
    o.rho_hook = c.rho_hook;
    o.delta0 = c.delta0;
    o.region_margin = c.region_margin;
    o.quad = c.quad;
    return o;
}

}  // namespace nmkdv
