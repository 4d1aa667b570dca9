#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cpshift/asymptotics.hpp"
#include "cpshift/diagrams.hpp"
#include "cpshift/errors.hpp"
#include "cpshift/euler_maclaurin.hpp"
#include "cpshift/fitting.hpp"
#include "cpshift/lattice_sum.hpp"
#include "cpshift/model.hpp"

namespace cpshift::cli {

inline constexpr const char* threads_env = "CPSHIFT_THREADS";

struct RunConfig {
    ModelParams params;
    LatticeSpec lattice{0.01, 50};
    std::string orientation = "zz";
    std::optional<Vec3> test_dipole;
    std::optional<Vec3> array_dipole;
    double z_min = 0.01;
    double z_max = 100.0;
    int points_per_decade = 64;
    double site_budget = 1e10;            // resonant pair-term evaluations per z point
    double offres_site_budget = 2e4;      // off-resonant evaluations per z point
    std::uint64_t seed = 42;
    unsigned threads = 1;
    double quad_rel_tol = 1e-10;
};

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) throw ConfigError("bad number for " + key + ": '" + text + "'");
    return v;
}

inline std::int64_t parse_int(const std::string& key, const std::string& text)
{
    const double v = parse_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("expected an integer for " + key + ": '" + text + "'");
    return static_cast<std::int64_t>(v);
}

inline Vec3 parse_vec(const std::string& key, const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(parse_double(key, item));
    if (parts.size() != 3) throw ConfigError(key + " needs three comma-separated components");
    return {parts[0], parts[1], parts[2]};
}

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{"mu",        "rho",          "a_tilde",      "half_extent",       "atoms",
                                               "orientation", "test_dipole", "array_dipole", "z_min",             "z_max",
                                               "points_per_decade", "site_budget", "offres_site_budget", "seed", "threads",
                                               "quad_rel_tol"};
    return keys;
}

inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value)
{
    if (key == "mu") c.params.mu = parse_double(key, value);
    else if (key == "rho") c.params.rho = parse_double(key, value);
    else if (key == "a_tilde") c.lattice.a_tilde = parse_double(key, value);
    else if (key == "half_extent") {
        c.lattice.half_extent = parse_int(key, value);
        if (c.lattice.half_extent < 0) throw ConfigError("half_extent must be >= 0");
    } else if (key == "atoms") {
        const double n = parse_double(key, value);
        if (!(n >= 1.0)) throw ConfigError("atoms must be >= 1");
        c.lattice.half_extent = half_extent_for_atoms(n);
    } else if (key == "orientation") {
        const std::string v = trim(value);
        if (v != "zz" && v != "zx" && v != "custom") throw ConfigError("orientation must be zz, zx or custom");
        c.orientation = v;
    } else if (key == "test_dipole") c.test_dipole = parse_vec(key, value);
    else if (key == "array_dipole") c.array_dipole = parse_vec(key, value);
    else if (key == "z_min") c.z_min = parse_double(key, value);
    else if (key == "z_max") c.z_max = parse_double(key, value);
    else if (key == "points_per_decade") {
        const auto v = parse_int(key, value);
        if (v < 1) throw ConfigError("points_per_decade must be >= 1");
        c.points_per_decade = static_cast<int>(v);
    } else if (key == "site_budget") c.site_budget = parse_double(key, value);
    else if (key == "offres_site_budget") c.offres_site_budget = parse_double(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "threads") {
        const auto v = parse_int(key, value);
        if (v < 0) throw ConfigError("threads must be >= 0");
        c.threads = static_cast<unsigned>(v);
    } else if (key == "quad_rel_tol") {
        c.quad_rel_tol = parse_double(key, value);
        if (!(c.quad_rel_tol > 0.0)) throw ConfigError("quad_rel_tol must be positive");
    } else throw ConfigError("unknown config key '" + key + "'");
}

// key = value lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

inline void apply_text(RunConfig& c, const std::string& text)
{
    for (const auto& [k, v] : parse_config_text(text)) apply_setting(c, k, v);
}

inline void apply_file(RunConfig& c, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    apply_text(c, ss.str());
}

// Resolves orientation and environment, then validates.
inline RunConfig finalize(RunConfig c)
{
    if (c.orientation == "custom") {
        if (!c.test_dipole || !c.array_dipole) throw ConfigError("orientation=custom needs test_dipole and array_dipole");
        c.params.test_dipole = *c.test_dipole;
        c.params.array_dipole = *c.array_dipole;
    } else {
        if (c.test_dipole || c.array_dipole) throw ConfigError("test_dipole/array_dipole are only used with orientation=custom");
        c.params.test_dipole = unit_z;
        c.params.array_dipole = c.orientation == "zz" ? unit_z : unit_x;
    }
    if (const char* env = std::getenv(threads_env); env && *env) {
        const auto v = parse_int(threads_env, env);
        if (v < 0) throw ConfigError("CPSHIFT_THREADS must be >= 0");
        c.threads = static_cast<unsigned>(v);
    }
    if (!(c.z_min > 0.0) || !(c.z_max >= c.z_min)) throw ConfigError("need 0 < z_min <= z_max");
    validate_params(c.params);
    if (!(c.lattice.a_tilde > 0.0)) throw NonPositiveLength("a_tilde must be positive");
    return c;
}

inline std::optional<Orientation> closed_form_orientation(const RunConfig& c)
{
    if (c.orientation == "zz") return Orientation::zz;
    if (c.orientation == "zx") return Orientation::zx;
    return std::nullopt;
}

inline std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<double> z_grid(double z_min, double z_max, int per_decade)
{
    std::vector<double> zs;
    const double decades = std::log10(z_max / z_min);
    const auto n = static_cast<long>(std::floor(decades * per_decade + 1e-9));
    for (long i = 0; i <= n; ++i) zs.push_back(z_min * std::pow(10.0, static_cast<double>(i) / per_decade));
    return zs;
}

inline SumOptions sum_options(const RunConfig& c)
{
    SumOptions o;
    o.threads = c.threads;
    o.quad.rel_tol = c.quad_rel_tol;
    return o;
}

inline IntegrationOptions integration_options(const RunConfig& c)
{
    IntegrationOptions o;
    o.outer.rel_tol = c.quad_rel_tol;
    o.inner.rel_tol = std::max(c.quad_rel_tol * 1e-2, 1e-14);
    return o;
}

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline SweepTable build_sweep(const RunConfig& cfg, std::ostream* notes = nullptr)
{
    const RunConfig c = finalize(cfg);
    const auto& p = c.params;
    const auto& lat = c.lattice;
    const double res_terms = reduced_term_count(p, lat.half_extent);
    if (res_terms > c.site_budget)
        throw SiteBudgetExceeded("resonant direct sum needs " + fmt17(res_terms) + " pair evaluations per point, budget is " + fmt17(c.site_budget));
    const bool offres_direct = res_terms <= c.offres_site_budget;
    if (!offres_direct && notes)
        *notes << "offresonant_direct skipped: " << fmt17(res_terms) << " evaluations per point exceed offres_site_budget\n";
    const bool even = plane_parity(p).both();
    if (!even && notes) *notes << "orientation is not reflection-even; Euler-Maclaurin columns are nan\n";

    SweepTable t;
    t.columns = {"z_tilde",        "resonant_direct",    "offresonant_direct", "resonant_bulk",  "resonant_edge",
                 "resonant_vertex", "resonant_em_total", "offresonant_bulk",   "offresonant_edge", "offresonant_vertex",
                 "offresonant_em_total"};
    const auto orient = closed_form_orientation(c);
    std::vector<Regime> regimes;
    if (orient) {
        for (const auto& r : regimes_for(*orient)) {
            regimes.push_back(r);
            t.columns.push_back("asym_" + to_string(r));
        }
    }
    const double nan = std::nan("");
    const auto sopt = sum_options(c);
    const auto iopt = integration_options(c);
    for (double z : z_grid(c.z_min, c.z_max, c.points_per_decade)) {
        const Geometry g{z};
        validate(p, lat, g);
        std::vector<double> row{z};
        row.push_back(sum_lattice(p, lat, g, ShiftKind::resonant, sopt).resonant);
        row.push_back(offres_direct ? sum_lattice(p, lat, g, ShiftKind::off_resonant, sopt).off_resonant : nan);
        for (auto kind : {ShiftKind::resonant, ShiftKind::off_resonant}) {
            if (even) {
                const auto b = decompose(p, lat, g, kind, iopt);
                row.insert(row.end(), {b.bulk, b.edge, b.vertex, b.total});
            } else {
                row.insert(row.end(), {nan, nan, vertex_term(p, g, kind, sopt.quad), nan});
            }
        }
        for (const auto& r : regimes) row.push_back(asymptotic_shift(r, p, lat, g));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_csv(const SweepTable& t, std::ostream& out)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
        out << '\n';
    }
}

inline void cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& notes)
{
    write_csv(build_sweep(cfg, &notes), out);
}

inline void cmd_decompose(const RunConfig& cfg, double z, std::ostream& out)
{
    const RunConfig c = finalize(cfg);
    const auto& p = c.params;
    const auto& lat = c.lattice;
    const Geometry g{z};
    validate(p, lat, g);
    const double terms = reduced_term_count(p, lat.half_extent);
    out << "lattice: a_tilde=" << fmt17(lat.a_tilde) << " M=" << lat.half_extent << " atoms=" << lat.side() * lat.side() << '\n';
    out << "z_tilde=" << fmt17(z) << " mu=" << fmt17(p.mu) << " rho=" << fmt17(p.rho) << " orientation=" << c.orientation << '\n';
    struct Line {
        ShiftKind kind;
        ShiftBreakdown b;
        double direct;
    };
    std::vector<Line> lines;
    for (auto kind : {ShiftKind::resonant, ShiftKind::off_resonant}) {
        const auto b = decompose(p, lat, g, kind, integration_options(c));
        const double budget = kind == ShiftKind::resonant ? c.site_budget : c.offres_site_budget;
        double direct = std::nan("");
        if (terms <= budget) {
            const auto r = sum_lattice(p, lat, g, kind, sum_options(c));
            direct = kind == ShiftKind::resonant ? r.resonant : r.off_resonant;
        }
        lines.push_back({kind, b, direct});
        const double mag = std::abs(b.bulk) + std::abs(b.edge) + std::abs(b.vertex);
        const char* lead = std::abs(b.bulk) >= std::abs(b.vertex) ? (std::abs(b.bulk) >= std::abs(b.edge) ? "bulk" : "edge")
                                                                  : (std::abs(b.vertex) >= std::abs(b.edge) ? "vertex" : "edge");
        out << to_string(kind) << ": bulk=" << fmt17(b.bulk) << " edge=" << fmt17(b.edge) << " vertex=" << fmt17(b.vertex)
            << " total=" << fmt17(b.total) << " (" << lead << "-dominated";
        if (mag > 0.0) out << ", bulk share " << fmt17(std::abs(b.bulk) / mag);
        out << ")\n";
        if (std::isfinite(direct)) out << "  direct sum over " << lat.side() * lat.side() << " sites: " << fmt17(direct) << '\n';
    }
    out << "kind,z_tilde,half_extent,atoms,bulk,edge,vertex,total,direct\n";
    for (const auto& l : lines) {
        out << to_string(l.kind) << ',' << fmt17(z) << ',' << lat.half_extent << ',' << lat.side() * lat.side() << ','
            << fmt17(l.b.bulk) << ',' << fmt17(l.b.edge) << ',' << fmt17(l.b.vertex) << ',' << fmt17(l.b.total) << ','
            << fmt17(l.direct) << '\n';
    }
}

inline void cmd_asymptotic(const RunConfig& cfg, double z, std::ostream& out)
{
    const RunConfig c = finalize(cfg);
    const auto orient = closed_form_orientation(c);
    if (!orient) throw ConfigError("asymptotic laws exist only for zz and zx orientations");
    const Geometry g{z};
    validate(c.params, c.lattice, g);
    out << "regime,value,z_exponent,a_exponent\n";
    for (const auto& r : regimes_for(*orient)) {
        const auto law = expected_exponent(r);
        out << to_string(r) << ',' << fmt17(asymptotic_shift(r, c.params, c.lattice, g)) << ',';
        if (law.vanishes) out << "vanishes,vanishes\n";
        else out << law.z_power << ',' << law.a_power << '\n';
    }
}

inline constexpr double diagram_tolerance = 1e-10;

// Returns the process exit code: 0 when the identity holds, 3 otherwise.
inline int cmd_verify_diagrams(std::int64_t samples, std::uint64_t seed, std::optional<ProcessId> corrupt, std::ostream& out)
{
    DenominatorOverride hook;
    if (corrupt) {
        const ProcessId bad = *corrupt;
        hook = [bad](ProcessId p, double w, double wp, const ModelParams& prm) -> std::optional<double> {
            if (p != bad) return std::nullopt;
            return 1.001 * denominator(p, w, wp, prm);
        };
    }
    const auto r = verify_diagram_identity(samples, seed, hook);
    out << "samples=" << r.samples << " max_relative_deviation=" << fmt17(r.max_relative_deviation) << " worst=(w=" << fmt17(r.worst_w)
        << ", wp=" << fmt17(r.worst_wp) << ", mu=" << fmt17(r.worst_mu) << ")";
    if (corrupt) out << " corrupted=" << to_string(*corrupt);
    const bool ok = r.max_relative_deviation <= diagram_tolerance;
    out << (ok ? " OK" : " FAILED") << '\n';
    return ok ? 0 : 3;
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// (z_tilde, column) pairs with finite values.
inline std::vector<SamplePoint> read_column(std::istream& in, const std::string& column)
{
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    const auto header = split_csv_line(line);
    int zi = -1, ci = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        if (header[i] == "z_tilde") zi = i;
        if (header[i] == column) ci = i;
    }
    if (zi < 0) throw ConfigError("CSV has no z_tilde column");
    if (ci < 0) throw ConfigError("CSV has no column named '" + column + "'");
    std::vector<SamplePoint> pts;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        if (static_cast<int>(f.size()) <= std::max(zi, ci)) throw ConfigError("short CSV row");
        const double z = std::strtod(f[zi].c_str(), nullptr);
        const double v = std::strtod(f[ci].c_str(), nullptr);
        if (std::isfinite(z) && std::isfinite(v)) pts.push_back({z, v});
    }
    return pts;
}

enum class FitMode { direct, envelope };

inline FitReport fit_points(const std::vector<SamplePoint>& pts, FitWindow window, FitMode mode)
{
    return mode == FitMode::direct ? fit_power_law(pts, window) : envelope_fit(pts, window);
}

inline void print_fit(const FitReport& r, const std::string& column, std::ostream& out)
{
    out << "column=" << column << " window=[" << fmt17(r.window.lo) << ", " << fmt17(r.window.hi) << "] points=" << r.points << '\n';
    out << "slope=" << fmt17(r.slope) << '\n';
    out << "intercept=" << fmt17(r.intercept) << '\n';
    out << "r_squared=" << fmt17(r.r_squared) << '\n';
}

inline FitReport cmd_fit(const std::string& csv_path, const std::string& column, FitWindow window, FitMode mode, std::ostream& out)
{
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open " + csv_path);
    const auto r = fit_points(read_column(in, column), window, mode);
    print_fit(r, column, out);
    return r;
}

} // namespace cpshift::cli
