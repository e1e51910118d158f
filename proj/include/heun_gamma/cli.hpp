#pragma once

// Job configuration (JSON) and the command implementations behind the
// heun-gamma executable.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "heun_gamma/equations.hpp"
#include "heun_gamma/errors.hpp"
#include "heun_gamma/expansion.hpp"
#include "heun_gamma/oracle.hpp"
#include "heun_gamma/recurrence.hpp"
#include "heun_gamma/termination.hpp"

namespace heun::cli {

using json = nlohmann::ordered_json;

struct GridSpec {
    std::optional<cplx> center;
    std::optional<double> radius;
    std::size_t count = 20;
    std::vector<cplx> points; ///< explicit points take precedence
};

struct OutputSpec {
    std::string samples = "samples.csv";
    std::string report = "report.json";
};

struct JobConfig {
    Variant variant = Variant::SCHE;
    cplx gamma, delta, epsilon, alpha, q;
    std::string scheme;
    std::optional<cplx> mu; ///< empty means "auto"
    std::optional<cplx> lambda;
    std::size_t N = 60;
    std::size_t termination_N = 1;
    GridSpec grid;
    double tolerance = 1e-8;
    OutputSpec output;

    ConfluentHeun equation() const { return {variant, gamma, delta, epsilon, alpha, q}; }
    RecurrenceScheme recurrence_scheme() const { return scheme_from_id(scheme, lambda); }
};

namespace detail {

inline std::string line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return std::to_string(line);
}

inline cplx complex_field(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("field '" + field + "' must be a two-element array [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::size_t count_field(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError("field '" + field + "' must be a non-negative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

inline double real_field(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError("field '" + field + "' must be a number");
    return j.get<double>();
}

inline std::string string_field(const json& j, const std::string& field) {
    if (!j.is_string()) throw ParseError("field '" + field + "' must be a string");
    return j.get<std::string>();
}

inline Variant variant_from(const std::string& s) {
    std::string u;
    for (char ch : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (u == "SCHE") return Variant::SCHE;
    if (u == "DCHE") return Variant::DCHE;
    if (u == "BCHE") return Variant::BCHE;
    if (u == "TCHE") return Variant::TCHE;
    throw ParseError("field 'equation' must be one of SCHE, DCHE, BCHE, TCHE");
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

} // namespace detail

/// Checks the configuration against the scheme preconditions.
inline void validate(const JobConfig& cfg) {
    RecurrenceScheme sc;
    try {
        sc = cfg.recurrence_scheme();
    } catch (const PreconditionError& e) {
        throw ValidationError(e.what());
    }
    if (sc.variant != cfg.variant)
        throw ValidationError("scheme '" + cfg.scheme + "' does not belong to equation " + to_string(cfg.variant));
    try {
        build_recurrence(cfg.equation(), sc);
    } catch (const PreconditionError& e) {
        throw ValidationError(e.what());
    } catch (const DegenerateError& e) {
        throw ValidationError(e.what());
    }
    if (cfg.N == 0) throw ValidationError("N ≥ 1 required");
    if (!(cfg.tolerance > 0.0)) throw ValidationError("tolerance > 0 required");
}

inline JobConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON at line " + detail::line_of(text, e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("configuration must be a JSON object");
    JobConfig cfg;
    bool have_eq = false, have_scheme = false;
    bool have[5] = {false, false, false, false, false};
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        if (k == "equation") {
            cfg.variant = detail::variant_from(detail::string_field(v, k));
            have_eq = true;
        } else if (k == "gamma") {
            cfg.gamma = detail::complex_field(v, k);
            have[0] = true;
        } else if (k == "delta") {
            cfg.delta = detail::complex_field(v, k);
            have[1] = true;
        } else if (k == "epsilon") {
            cfg.epsilon = detail::complex_field(v, k);
            have[2] = true;
        } else if (k == "alpha") {
            cfg.alpha = detail::complex_field(v, k);
            have[3] = true;
        } else if (k == "q") {
            cfg.q = detail::complex_field(v, k);
            have[4] = true;
        } else if (k == "scheme") {
            cfg.scheme = detail::string_field(v, k);
            have_scheme = true;
        } else if (k == "mu") {
            if (v.is_string()) {
                if (v.get<std::string>() != "auto") throw ParseError("field 'mu' must be \"auto\" or [re, im]");
            } else {
                cfg.mu = detail::complex_field(v, k);
            }
        } else if (k == "lambda") {
            cfg.lambda = detail::complex_field(v, k);
        } else if (k == "N") {
            cfg.N = detail::count_field(v, k);
        } else if (k == "termination_N") {
            cfg.termination_N = detail::count_field(v, k);
        } else if (k == "tolerance") {
            cfg.tolerance = detail::real_field(v, k);
        } else if (k == "grid") {
            if (!v.is_object()) throw ParseError("field 'grid' must be an object");
            for (auto g = v.begin(); g != v.end(); ++g) {
                const std::string gk = "grid." + g.key();
                if (g.key() == "center") {
                    cfg.grid.center = detail::complex_field(g.value(), gk);
                } else if (g.key() == "radius") {
                    cfg.grid.radius = detail::real_field(g.value(), gk);
                } else if (g.key() == "count") {
                    cfg.grid.count = detail::count_field(g.value(), gk);
                } else if (g.key() == "points") {
                    if (!g.value().is_array()) throw ParseError("field 'grid.points' must be an array");
                    for (const auto& p : g.value()) cfg.grid.points.push_back(detail::complex_field(p, gk));
                } else {
                    throw ParseError("unknown key '" + gk + "'");
                }
            }
        } else if (k == "output") {
            if (!v.is_object()) throw ParseError("field 'output' must be an object");
            for (auto o = v.begin(); o != v.end(); ++o) {
                const std::string ok = "output." + o.key();
                if (o.key() == "samples") {
                    cfg.output.samples = detail::string_field(o.value(), ok);
                } else if (o.key() == "report") {
                    cfg.output.report = detail::string_field(o.value(), ok);
                } else {
                    throw ParseError("unknown key '" + ok + "'");
                }
            }
        } else {
            throw ParseError("unknown key '" + k + "'");
        }
    }
    if (!have_eq) throw ParseError("missing field 'equation'");
    if (!have_scheme) throw ParseError("missing field 'scheme'");
    const char* names[5] = {"gamma", "delta", "epsilon", "alpha", "q"};
    for (int i = 0; i < 5; ++i)
        if (!have[i]) throw ParseError(std::string("missing field '") + names[i] + "'");
    validate(cfg);
    return cfg;
}

/// Canonical JSON form; parse_config(dump) reproduces the configuration.
inline json config_to_json(const JobConfig& cfg) {
    json j;
    j["equation"] = to_string(cfg.variant);
    j["gamma"] = detail::to_json(cfg.gamma);
    j["delta"] = detail::to_json(cfg.delta);
    j["epsilon"] = detail::to_json(cfg.epsilon);
    j["alpha"] = detail::to_json(cfg.alpha);
    j["q"] = detail::to_json(cfg.q);
    j["scheme"] = cfg.scheme;
    j["mu"] = cfg.mu ? detail::to_json(*cfg.mu) : json("auto");
    if (cfg.lambda) j["lambda"] = detail::to_json(*cfg.lambda);
    j["N"] = cfg.N;
    j["termination_N"] = cfg.termination_N;
    json grid;
    if (cfg.grid.center) grid["center"] = detail::to_json(*cfg.grid.center);
    if (cfg.grid.radius) grid["radius"] = *cfg.grid.radius;
    grid["count"] = cfg.grid.count;
    if (!cfg.grid.points.empty()) {
        json pts = json::array();
        for (cplx p : cfg.grid.points) pts.push_back(detail::to_json(p));
        grid["points"] = pts;
    }
    j["grid"] = grid;
    j["tolerance"] = cfg.tolerance;
    j["output"] = {{"samples", cfg.output.samples}, {"report", cfg.output.report}};
    return j;
}

inline bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.center == b.center && a.radius == b.radius && a.count == b.count && a.points == b.points;
}

inline bool operator==(const JobConfig& a, const JobConfig& b) {
    return a.variant == b.variant && a.gamma == b.gamma && a.delta == b.delta && a.epsilon == b.epsilon &&
           a.alpha == b.alpha && a.q == b.q && a.scheme == b.scheme && a.mu == b.mu && a.lambda == b.lambda &&
           a.N == b.N && a.termination_N == b.termination_N && a.grid == b.grid && a.tolerance == b.tolerance &&
           a.output.samples == b.output.samples && a.output.report == b.output.report;
}

/// Evaluation points: explicit list, or a deterministic sunflower pattern in
/// the disk (center, radius), defaulting to the half-radius disk of the series.
inline std::vector<cplx> grid_points(const GridSpec& grid, const GammaSeries& g) {
    if (!grid.points.empty()) return grid.points;
    const cplx center = grid.center.value_or(g.z1);
    const double radius = grid.radius.value_or(std::isfinite(g.radius) ? 0.5 * g.radius : 1.0);
    std::vector<cplx> out;
    for (std::size_t k = 0; k < grid.count; ++k) {
        const double r = radius * std::sqrt((static_cast<double>(k) + 0.5) / static_cast<double>(grid.count));
        const double th = std::remainder(0.3 + 2.399963229728653 * static_cast<double>(k), 2.0 * num::kPi);
        out.push_back(center + std::polar(r, th));
    }
    return out;
}

enum class Command { Solve, Verify, Terminate, Reductions, Special };

inline Command command_from(const std::string& s) {
    if (s == "solve") return Command::Solve;
    if (s == "verify") return Command::Verify;
    if (s == "terminate") return Command::Terminate;
    if (s == "reductions") return Command::Reductions;
    if (s == "special") return Command::Special;
    throw ParseError("unknown command '" + s + "'");
}

namespace detail {

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw EvaluationError("cannot write " + path.string());
    f << text;
}

inline json base_report(const std::string& command, const JobConfig& cfg) {
    json r;
    r["schema_version"] = "1";
    r["command"] = command;
    r["equation"] = to_string(cfg.variant);
    r["scheme"] = cfg.scheme;
    return r;
}

inline json series_metadata(const GammaSeries& g) {
    json m;
    m["center"] = to_json(g.z1);
    m["mu"] = to_json(g.mu);
    m["N"] = g.order();
    m["weight_scale"] = to_json(g.s);
    m["weight_power"] = g.p;
    m["prefactor"] = to_json(g.prefactor);
    m["c0"] = to_json(g.c0);
    m["convergence_radius"] = std::isfinite(g.radius) ? json(g.radius) : json("infinity");
    m["formal"] = g.formal;
    m["logarithmic_branch_excluded"] = g.relation.logarithmic_branch_excluded;
    m["coefficient_scale_log10"] = g.coeffs.scale_log10;
    json coeffs = json::array();
    for (cplx c : g.coeffs.c) coeffs.push_back(to_json(c));
    m["coefficients"] = coeffs;
    return m;
}

inline GammaSeries build_series(const JobConfig& cfg) {
    const ConfluentHeun eq = cfg.equation();
    GammaSeries g = assemble(eq, cfg.recurrence_scheme(), cfg.mu, cfg.N);
    determine_c0(g, eq);
    return g;
}

} // namespace detail

/// Runs one command; returns the process exit status (0 ok, 2 tolerance failure).
inline int run(Command cmd, const JobConfig& cfg, const std::filesystem::path& out_dir) {
    const ConfluentHeun eq = cfg.equation();
    const auto report_path = out_dir / cfg.output.report;
    switch (cmd) {
    case Command::Solve: {
        const GammaSeries g = detail::build_series(cfg);
        std::string csv = "z_re,z_im,u_re,u_im,uprime_re,uprime_im,residual\n";
        std::size_t outside = 0;
        for (cplx z : grid_points(cfg.grid, g)) {
            const SeriesValue v = evaluate(g, z);
            if (!v.in_region) ++outside;
            csv += detail::fmt(z.real()) + "," + detail::fmt(z.imag()) + "," + detail::fmt(v.u.real()) + "," +
                   detail::fmt(v.u.imag()) + "," + detail::fmt(v.du.real()) + "," + detail::fmt(v.du.imag()) + "," +
                   detail::fmt(normalized_residual(eq, z, v)) + "\n";
        }
        detail::write_text(out_dir / cfg.output.samples, csv);
        json r = detail::base_report("solve", cfg);
        r["series"] = detail::series_metadata(g);
        r["samples_file"] = cfg.output.samples;
        r["points_outside_region"] = outside;
        detail::write_text(report_path, r.dump(2) + "\n");
        return 0;
    }
    case Command::Verify: {
        const GammaSeries g = detail::build_series(cfg);
        const bool explicit_grid = !cfg.grid.points.empty() || cfg.grid.center || cfg.grid.radius;
        const std::vector<cplx> probes = explicit_grid ? grid_points(cfg.grid, g) : default_probes(g);
        const double max_error = compare(g, eq, probes);
        const RationalOperator op = v_operator(eq, g.scheme);
        std::vector<cplx> c = g.coeffs.c;
        const double residual = residual_power_series(op, g.mu, c, g.z1).max_relative();
        const bool pass = max_error <= cfg.tolerance;
        json r = detail::base_report("verify", cfg);
        r["series"] = detail::series_metadata(g);
        r["probes"] = probes.size();
        r["max_error"] = max_error;
        r["residual_max_relative"] = residual;
        r["tolerance"] = cfg.tolerance;
        r["pass"] = pass;
        detail::write_text(report_path, r.dump(2) + "\n");
        return pass ? 0 : 2;
    }
    case Command::Terminate: {
        const RecurrenceScheme sc = cfg.recurrence_scheme();
        const cplx mu = cfg.mu.value_or(admissible_exponents(eq, sc).front());
        ConfluentHeun fixed = eq;
        fixed.alpha = rhs_alpha(eq, sc, cfg.termination_N, mu);
        const TerminationCandidate cand = find_terminating_q(fixed, sc, cfg.termination_N, mu, cfg.tolerance);
        json r = detail::base_report("terminate", cfg);
        r["N"] = cand.N;
        r["mu"] = detail::to_json(cand.mu);
        r["alpha"] = detail::to_json(cand.alpha);
        auto roots = [](const std::vector<RootCertificate>& v) {
            json a = json::array();
            for (const auto& rc : v) {
                json e;
                e["q"] = detail::to_json(rc.q);
                e["c_next1"] = rc.next1;
                e["c_next2"] = rc.next2;
                e["residual"] = std::isfinite(rc.residual) ? json(rc.residual) : json(nullptr);
                if (!rc.note.empty()) e["note"] = rc.note;
                a.push_back(e);
            }
            return a;
        };
        r["certified"] = roots(cand.certified);
        r["uncertified"] = roots(cand.uncertified);
        detail::write_text(report_path, r.dump(2) + "\n");
        return 0;
    }
    case Command::Reductions: {
        const ReductionReport rep = detect_reductions(eq, cfg.recurrence_scheme());
        json r = detail::base_report("reductions", cfg);
        json terms = json::array();
        for (std::size_t i = 0; i < rep.names.size(); ++i)
            terms.push_back({{"name", rep.names[i]}, {"vanishing", static_cast<bool>(rep.vanishing[i])}});
        r["terms"] = terms;
        r["original_terms"] = rep.original_terms;
        r["effective_terms"] = rep.effective_terms;
        r["successive"] = rep.successive;
        json lc = json::array();
        for (const auto& c : rep.lambda_choices) lc.push_back({{"term", c.term}, {"lambda", detail::to_json(c.lambda)}});
        r["lambda_choices"] = lc;
        detail::write_text(report_path, r.dump(2) + "\n");
        return 0;
    }
    case Command::Special: {
        const auto cf = special_closed_form(eq);
        json r = detail::base_report("special", cfg);
        r["match"] = cf.has_value();
        if (cf) {
            r["name"] = cf->name();
            r["description"] = cf->description();
            std::vector<cplx> pts = cfg.grid.points;
            if (pts.empty()) {
                const cplx c = cfg.grid.center.value_or(cf->kind() == ClosedFormKind::Quadrature ? cf->base() : 0.0);
                const double rad = cfg.grid.radius.value_or(0.5);
                for (std::size_t k = 0; k < cfg.grid.count; ++k)
                    pts.push_back(c + std::polar(rad * (k + 1.0) / static_cast<double>(cfg.grid.count),
                                                 0.25 + 2.399963229728653 * static_cast<double>(k)));
            }
            json samples = json::array();
            for (cplx z : pts) {
                const ValueDeriv b1 = cf->basis(1, z), b2 = cf->basis(2, z);
                samples.push_back({{"z", detail::to_json(z)}, {"u1", detail::to_json(b1.u)}, {"u2", detail::to_json(b2.u)}});
            }
            r["samples"] = samples;
        }
        detail::write_text(report_path, r.dump(2) + "\n");
        return 0;
    }
    }
    return 1;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot read configuration file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace heun::cli
