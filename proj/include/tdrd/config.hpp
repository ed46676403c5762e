#pragma once

// Run configuration shared by every CLI subcommand, stored as JSON.
// Only matrix.{m,a,b,c} is required; every other field has a default.

#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tdrd/errors.hpp"
#include "tdrd/hpoly.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/reaction.hpp"
#include "tdrd/regions.hpp"
#include "tdrd/simulator.hpp"
#include "tdrd/spectral.hpp"

namespace tdrd {

struct MatrixConfig {
    int m = 0;
    double a = 0.0, b = 0.0, c = 0.0;
};

struct CertificateConfig {
    int p_m = 2;
    std::optional<Vector> thetas;  // nullopt means "search"
};

struct ReactionConfig {
    std::string kind = "lotka-chain";  // lotka-chain | pure-growth | zero | expression
    Vector r;                          // lotka-chain; empty -> all ones
    std::vector<Vector> c;             // lotka-chain; empty -> chain coupling
    Vector S;                          // empty -> all ones
    std::vector<std::string> expressions;
    int degree = 2;  // expression kind only
};

struct BoundaryConfig {
    double alpha = 0.0;
    Vector B;  // empty -> zeros
    std::string form = "plain";  // plain | diffusion-weighted
};

/// w_l(x) = base_l + amplitude_l cos(pi x / length) + noise_l * u,  u ~ U[0,1)
struct InitialConfig {
    Vector base;       // empty -> 1
    Vector amplitude;  // empty -> 0.5
    Vector noise;      // empty -> 0.1
};

struct AuditConfig {
    int samples = 2000;
    Vector radii{1.0, 10.0, 100.0, 1000.0};
};

struct OutputConfig {
    std::string csv;              // empty -> stdout
    std::string snapshot_prefix;  // empty -> no snapshot files
};

struct RunConfig {
    MatrixConfig matrix;
    std::vector<int> region;  // empty -> all +1
    CertificateConfig certificate;
    ReactionConfig reaction;
    BoundaryConfig boundary;
    int n_x = 100;
    double length = 1.0;
    SimParams time;
    InitialConfig initial;
    AuditConfig audit;
    Vector point;  // regions subcommand
    OutputConfig output;
    std::uint64_t seed = 1;
    bool allow_failed_certificate = false;
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

inline const nlohmann::json& section(const nlohmann::json& j, const char* key) {
    static const nlohmann::json empty = nlohmann::json::object();
    auto it = j.find(key);
    if (it == j.end()) return empty;
    if (!it->is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
    return *it;
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        if (!j.is_object()) throw ConfigError("config: top level must be an object");
        const auto& mx = detail::section(j, "matrix");
        for (const char* k : {"m", "a", "b", "c"})
            if (!mx.contains(k)) throw ConfigError(std::string("config: matrix.") + k + " is required");
        cfg.matrix = {mx.at("m").get<int>(), mx.at("a").get<double>(), mx.at("b").get<double>(),
                      mx.at("c").get<double>()};
        detail::read_opt(j, "region", cfg.region);

        const auto& ce = detail::section(j, "certificate");
        detail::read_opt(ce, "p_m", cfg.certificate.p_m);
        if (auto it = ce.find("thetas"); it != ce.end()) {
            if (it->is_string()) {
                if (it->get<std::string>() != "search") throw ConfigError("config: certificate.thetas must be an array or \"search\"");
            } else {
                cfg.certificate.thetas = it->get<Vector>();
            }
        }

        const auto& re = detail::section(j, "reaction");
        detail::read_opt(re, "kind", cfg.reaction.kind);
        detail::read_opt(re, "r", cfg.reaction.r);
        detail::read_opt(re, "c", cfg.reaction.c);
        detail::read_opt(re, "S", cfg.reaction.S);
        detail::read_opt(re, "expressions", cfg.reaction.expressions);
        detail::read_opt(re, "degree", cfg.reaction.degree);

        const auto& bc = detail::section(j, "boundary");
        detail::read_opt(bc, "alpha", cfg.boundary.alpha);
        detail::read_opt(bc, "B", cfg.boundary.B);
        detail::read_opt(bc, "form", cfg.boundary.form);

        const auto& gr = detail::section(j, "grid");
        detail::read_opt(gr, "n_x", cfg.n_x);
        detail::read_opt(gr, "length", cfg.length);

        const auto& ti = detail::section(j, "time");
        detail::read_opt(ti, "T", cfg.time.T);
        detail::read_opt(ti, "dt", cfg.time.dt);
        detail::read_opt(ti, "monitor_interval", cfg.time.monitor_interval);
        detail::read_opt(ti, "snapshot_times", cfg.time.snapshot_times);

        const auto& in = detail::section(j, "initial");
        detail::read_opt(in, "base", cfg.initial.base);
        detail::read_opt(in, "amplitude", cfg.initial.amplitude);
        detail::read_opt(in, "noise", cfg.initial.noise);

        const auto& au = detail::section(j, "audit");
        detail::read_opt(au, "samples", cfg.audit.samples);
        detail::read_opt(au, "radii", cfg.audit.radii);

        detail::read_opt(j, "point", cfg.point);
        const auto& out = detail::section(j, "output");
        detail::read_opt(out, "csv", cfg.output.csv);
        detail::read_opt(out, "snapshot_prefix", cfg.output.snapshot_prefix);
        detail::read_opt(j, "seed", cfg.seed);
        detail::read_opt(j, "allow_failed_certificate", cfg.allow_failed_certificate);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["matrix"] = {{"m", cfg.matrix.m}, {"a", cfg.matrix.a}, {"b", cfg.matrix.b}, {"c", cfg.matrix.c}};
    j["region"] = cfg.region;
    j["certificate"]["p_m"] = cfg.certificate.p_m;
    if (cfg.certificate.thetas) j["certificate"]["thetas"] = *cfg.certificate.thetas;
    else j["certificate"]["thetas"] = "search";
    j["reaction"] = {{"kind", cfg.reaction.kind},         {"r", cfg.reaction.r},
                     {"c", cfg.reaction.c},               {"S", cfg.reaction.S},
                     {"expressions", cfg.reaction.expressions}, {"degree", cfg.reaction.degree}};
    j["boundary"] = {{"alpha", cfg.boundary.alpha}, {"B", cfg.boundary.B}, {"form", cfg.boundary.form}};
    j["grid"] = {{"n_x", cfg.n_x}, {"length", cfg.length}};
    j["time"] = {{"T", cfg.time.T},
                 {"dt", cfg.time.dt},
                 {"monitor_interval", cfg.time.monitor_interval},
                 {"snapshot_times", cfg.time.snapshot_times}};
    j["initial"] = {{"base", cfg.initial.base}, {"amplitude", cfg.initial.amplitude}, {"noise", cfg.initial.noise}};
    j["audit"] = {{"samples", cfg.audit.samples}, {"radii", cfg.audit.radii}};
    j["point"] = cfg.point;
    j["output"] = {{"csv", cfg.output.csv}, {"snapshot_prefix", cfg.output.snapshot_prefix}};
    j["seed"] = cfg.seed;
    j["allow_failed_certificate"] = cfg.allow_failed_certificate;
    return j;
}

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

inline std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline ToeplitzDiffusion build_diffusion(const RunConfig& cfg) {
    return ToeplitzDiffusion::make(cfg.matrix.m, cfg.matrix.a, cfg.matrix.b, cfg.matrix.c);
}

inline RegionSpec build_region(const RunConfig& cfg) {
    if (cfg.region.empty()) return RegionSpec::all_positive(cfg.matrix.m);
    if (static_cast<int>(cfg.region.size()) != cfg.matrix.m) throw ConfigError("config: region needs m signs");
    return RegionSpec::from_signs(cfg.region);
}

inline ReactionSpec build_reaction(const RunConfig& cfg) {
    const int m = cfg.matrix.m;
    const auto& r = cfg.reaction;
    if (r.kind == "lotka-chain") {
        Matrix c;
        if (!r.c.empty()) {
            if (static_cast<int>(r.c.size()) != m) throw ConfigError("config: reaction.c must be m x m");
            c = Matrix(m, m);
            for (int i = 0; i < m; ++i) {
                if (static_cast<int>(r.c[i].size()) != m) throw ConfigError("config: reaction.c must be m x m");
                for (int k = 0; k < m; ++k) c(i, k) = r.c[i][k];
            }
        }
        return ReactionSpec::lotka_chain(m, r.r, std::move(c), r.S);
    }
    if (r.kind == "pure-growth") return ReactionSpec::pure_growth(m, r.S);
    if (r.kind == "zero") return ReactionSpec::zero(m, r.S);
    if (r.kind == "expression") return ReactionSpec::from_expressions(m, r.expressions, r.degree, r.S);
    throw ConfigError("config: unknown reaction kind '" + r.kind + "'");
}

inline BoundarySpec build_boundary(const RunConfig& cfg) {
    BoundaryForm form;
    if (cfg.boundary.form == "plain") form = BoundaryForm::plain;
    else if (cfg.boundary.form == "diffusion-weighted") form = BoundaryForm::diffusion_weighted;
    else throw ConfigError("config: boundary.form must be 'plain' or 'diffusion-weighted'");
    return BoundarySpec::make(cfg.matrix.m, cfg.boundary.alpha, cfg.boundary.B, form);
}

inline GridSpec build_grid(const RunConfig& cfg) { return GridSpec::make(cfg.n_x, cfg.length); }

/// Initial field in diagonal coordinates; the noise stream derives from the seed.
inline std::vector<Vector> build_initial_field(const RunConfig& cfg, const GridSpec& grid) {
    const int m = cfg.matrix.m;
    auto pick = [&](const Vector& v, double dflt, const char* name) {
        if (v.empty()) return Vector(m, dflt);
        if (static_cast<int>(v.size()) != m) throw ConfigError(std::string("config: initial.") + name + " needs m entries");
        return v;
    };
    const Vector base = pick(cfg.initial.base, 1.0, "base");
    const Vector amp = pick(cfg.initial.amplitude, 0.5, "amplitude");
    const Vector noise = pick(cfg.initial.noise, 0.1, "noise");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pi = std::acos(-1.0);
    std::vector<Vector> w(m, Vector(grid.nodes()));
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < grid.nodes(); ++i)
            w[l][i] = base[l] + amp[l] * std::cos(pi * grid.x(i) / grid.length) + noise[l] * unit(rng);
    return w;
}

}  // namespace tdrd
