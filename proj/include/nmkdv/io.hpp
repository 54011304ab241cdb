#pragma once

#include "nmkdv/pde_oracle.hpp"
#include "nmkdv/scattering.hpp"
#include "nmkdv/soliton.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace nmkdv {

using nlohmann::json;

inline json to_json(cx z) { return json::array({z.real(), z.imag()}); }

inline cx cx_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const std::vector<cx>& v) {
    json a = json::array();
    for (cx z : v) a.push_back(to_json(z));
    return a;
}

inline std::vector<cx> cx_vector_from_json(const json& j) {
    std::vector<cx> v;
    for (const auto& e : j) v.push_back(cx_from_json(e));
    return v;
}

/// Fixed 17 significant digits on a stream, restored on destruction.
class Precision17 {
  public:
    explicit Precision17(std::ostream& os) : os_(os), old_(os.precision()), flags_(os.flags()) {
        os_ << std::setprecision(17);
        os_.unsetf(std::ios::floatfield);
    }
    ~Precision17() {
        os_.precision(old_);
        os_.flags(flags_);
    }
    Precision17(const Precision17&) = delete;
    Precision17& operator=(const Precision17&) = delete;

  private:
    std::ostream& os_;
    std::streamsize old_;
    std::ios::fmtflags flags_;
};

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    Precision17 guard(os);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, header, rows);
}

inline void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_json(out, j);
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline const char* kind_name(DiscreteEigen::Kind k) {
    switch (k) {
        case DiscreteEigen::Kind::Complex: return "complex";
        case DiscreteEigen::Kind::Mirror: return "mirror";
        default: return "imaginary";
    }
}

inline DiscreteEigen::Kind kind_from_name(const std::string& s) {
    if (s == "complex") return DiscreteEigen::Kind::Complex;
    if (s == "mirror") return DiscreteEigen::Kind::Mirror;
    if (s == "imaginary") return DiscreteEigen::Kind::Imaginary;
    throw DomainError("unknown eigenvalue kind '" + s + "'");
}

inline json to_json(const DiscreteEigen& e) {
    return {{"eta", to_json(e.eta)}, {"A", to_json(e.A)}, {"b", to_json(e.b)},
            {"ds11", to_json(e.ds11)}, {"kind", kind_name(e.kind)}};
}

inline json to_json(const ContourSamples& cs) {
    return {{"u", cs.u},
            {"cutoff", cs.cutoff},
            {"rho_pos", to_json(cs.rho_pos)},
            {"rho_neg", to_json(cs.rho_neg)},
            {"rhot_pos", to_json(cs.rhot_pos)},
            {"rhot_neg", to_json(cs.rhot_neg)},
            {"rho_circ", to_json(cs.rho_circ)},
            {"rhot_circ", to_json(cs.rhot_circ)}};
}

inline ContourSamples contour_samples_from_json(const json& j) {
    ContourSamples cs;
    cs.u = j.at("u").get<std::vector<double>>();
    cs.cutoff = j.value("cutoff", 50.0);
    cs.rho_pos = cx_vector_from_json(j.at("rho_pos"));
    cs.rho_neg = cx_vector_from_json(j.at("rho_neg"));
    cs.rhot_pos = cx_vector_from_json(j.at("rhot_pos"));
    cs.rhot_neg = cx_vector_from_json(j.at("rhot_neg"));
    cs.rho_circ = cx_vector_from_json(j.at("rho_circ"));
    cs.rhot_circ = cx_vector_from_json(j.at("rhot_circ"));
    return cs;
}

/// Scattering file. "kind" is "samples" (contour tables), "synthetic" (closed-form profile with
/// parameters a, b) or "reflectionless" (rho = 0).
inline json scattering_to_json(const ScatteringData& sd, const std::string& kind, const json& extra = json::object()) {
    json j = {{"sigma", sd.sigma}, {"q_minus", sd.q_minus}, {"q_plus", sd.q_plus}, {"kind", kind}};
    json d = json::array();
    for (const DiscreteEigen& e : sd.discrete) d.push_back(to_json(e));
    j["discrete"] = d;
    if (sd.samples) j["contour"] = to_json(*sd.samples);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

inline ScatteringData scattering_from_json(const json& j) {
    const int sigma = j.at("sigma").get<int>();
    const double qm = j.at("q_minus").get<double>();
    const std::string kind = j.value("kind", std::string("samples"));
    ScatteringData sd;
    if (kind == "samples") {
        sd = from_samples(InitialDatum::from_function(sigma, qm, [qm](double) { return qm; }, 1.0),
                          contour_samples_from_json(j.at("contour")), {});
    } else if (kind == "synthetic") {
        sd = synthetic_reflection(sigma, qm, j.at("a").get<double>(), j.at("b").get<double>());
    } else if (kind == "reflectionless") {
        InitialDatum::check_boundary(sigma, qm, -sigma * qm);
        sd.sigma = sigma;
        sd.q_minus = qm;
        sd.q_plus = -sigma * qm;
    } else {
        throw DomainError("scattering file: unknown kind '" + kind + "'");
    }
    if (j.contains("discrete"))
        for (const auto& e : j["discrete"]) {
            DiscreteEigen d;
            d.eta = cx_from_json(e.at("eta"));
            d.A = cx_from_json(e.at("A"));
            if (e.contains("b")) d.b = cx_from_json(e["b"]);
            if (e.contains("ds11")) d.ds11 = cx_from_json(e["ds11"]);
            d.kind = e.contains("kind") ? kind_from_name(e["kind"].get<std::string>()) : DiscreteEigen::Kind::Complex;
            sd.discrete.push_back(d);
        }
    return sd;
}

/// Seed file: {"sigma", "q_minus", "poles": [{"eta": [re, im], "A": [re, im]} | {"eta": ..., "b": +-1}]}.
/// Poles given with b only are completed with A = b / s11'(eta) for reflectionless data.
inline SolitonSeed seed_from_json(const json& j) {
    const int sigma = j.at("sigma").get<int>();
    const double qm = j.at("q_minus").get<double>();
    InitialDatum::check_boundary(sigma, qm, -sigma * qm);
    const auto& poles = j.at("poles");
    bool all_b = !poles.empty();
    for (const auto& p : poles) all_b = all_b && !p.contains("A") && p.contains("b");
    if (all_b) {
        std::vector<cx> etas;
        std::vector<double> b;
        for (const auto& p : poles) {
            etas.push_back(cx_from_json(p.at("eta")));
            b.push_back(p.at("b").get<double>());
        }
        return reflectionless_seed(sigma, qm, etas, b);
    }
    SolitonSeed s{sigma, qm, {}};
    for (const auto& p : poles) s.poles.push_back({cx_from_json(p.at("eta")), cx_from_json(p.at("A"))});
    return s;
}

inline json seed_to_json(const SolitonSeed& s) {
    json poles = json::array();
    for (const SeedPole& p : s.poles) poles.push_back({{"eta", to_json(p.eta)}, {"A", to_json(p.A)}});
    return {{"sigma", s.sigma}, {"q_minus", s.q_minus}, {"poles", poles}};
}

/// "a:b:n" -> n equispaced values from a to b; a single number is a one-point range.
inline std::vector<double> parse_range(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() != 3) throw DomainError("range must be a:b:n, got '" + s + "'");
    const double a = std::stod(parts[0]), b = std::stod(parts[1]);
    const int n = std::stoi(parts[2]);
    if (n < 1) throw DomainError("range: n must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

/// "re,im;re,im;..." -> complex list.
inline std::vector<cx> parse_points(const std::string& s) {
    std::vector<cx> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto c = item.find(',');
        if (c == std::string::npos) out.emplace_back(std::stod(item), 0.0);
        else out.emplace_back(std::stod(item.substr(0, c)), std::stod(item.substr(c + 1)));
    }
    return out;
}

/// Field sequence CSV with rows t,x,re,im on a tensor grid; rows may come in any order.
inline FieldSeries read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<double, std::map<double, cx>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-' && line[0] != '+' && line[0] != '.')
            continue;
        std::stringstream ss(line);
        std::string a, b, c, d;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        std::getline(ss, d, ',');
        rows[std::stod(a)][std::stod(b)] = cx(std::stod(c), d.empty() ? 0.0 : std::stod(d));
    }
    FieldSeries f;
    for (const auto& [t, row] : rows) {
        f.t.push_back(t);
        std::vector<cx> vals;
        std::vector<double> xs;
        for (const auto& [x, q] : row) {
            xs.push_back(x);
            vals.push_back(q);
        }
        if (f.x.empty()) f.x = xs;
        else if (xs.size() != f.x.size()) throw DomainError(path + ": every time level needs the same x grid");
        f.q.push_back(std::move(vals));
    }
    return f;
}

}  // namespace nmkdv
