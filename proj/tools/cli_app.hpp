#pragma once

// Command implementations behind the `tightfocus` executable. Kept apart
// from argument parsing so the tests can drive them directly.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tightfocus/tightfocus.hpp"

namespace tightfocus::cli {

enum class Command { field_axial, field_focal_plane, rsc_scan, extinction_scan, table1, fit_spectrum, optimum };
enum class OutputFormat { csv, json };

inline const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names = {
        {"field-axial", Command::field_axial},   {"field-focal-plane", Command::field_focal_plane},
        {"rsc-scan", Command::rsc_scan},         {"extinction-scan", Command::extinction_scan},
        {"table1", Command::table1},             {"fit-spectrum", Command::fit_spectrum},
        {"optimum", Command::optimum}};
    return names;
}

inline std::string command_name(Command c) {
    for (const auto& [name, cmd] : command_names())
        if (cmd == c) return name;
    return "?";
}

struct UScan {
    double start = 0.01, step = 0.01, stop = 3.0;
};

struct RunConfig {
    Command command = Command::optimum;
    // geometry
    double w_l = 1.1e-3;
    double f = 4.5e-3;
    double lambda = 780e-9;
    std::optional<double> rho0;  // aperture radius of the lenses
    std::optional<double> na;    // alternatively, their numerical aperture
    // output
    std::string output = "-";  // "-" is stdout
    OutputFormat format = OutputFormat::csv;
    // numerics
    int grid_size = 512;
    std::string lens = "spherical";
    // field-axial
    double z_min = -15e-6, z_max = 15e-6;
    int samples = 301;
    // field-focal-plane
    double rho_max = 5e-6;
    // scans
    UScan u;
    double aperture_over_waist = 2.0;  // ρ₀/w_L for the aperture column when no rho0/na is given
    // table1
    std::optional<std::uint64_t> seed;
    long mc_samples = 100000;
    double temperature = 100e-6;
    double nu_rho = 70e3, nu_z = 20e3;
    // fit-spectrum
    std::string input;
    double linewidth_mhz = constants::rb87::d2_linewidth_mhz;
    double linewidth_threshold = 1.3;
    // optimum
    double u_lo = 0.5, u_hi = 5.0;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "4.5mm", "780nm", "1.1e-3" (metres), "0.3 um"
inline double parse_length(const std::string& text) {
    static const std::vector<std::pair<std::string, double>> units = {
        {"nm", 1e-9}, {"um", 1e-6}, {"\xC2\xB5m", 1e-6}, {"mm", 1e-3}, {"cm", 1e-2}, {"m", 1.0}};
    std::string s;
    for (char c : text)
        if (c != ' ') s += c;
    double scale = 1.0;
    for (const auto& [suffix, factor] : units) {
        if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
            s.resize(s.size() - suffix.size());
            scale = factor;
            break;
        }
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw UsageError("bad length '" + text + "' (units: nm, um, mm, cm, m)");
    return v * scale;
}

/// "start:step:stop"
inline UScan parse_u_scan(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t pos = 0;
            parts.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("bad --u range '" + text + "', expected start:step:stop");
        }
    }
    if (parts.size() != 3) throw UsageError("bad --u range '" + text + "', expected start:step:stop");
    if (!(parts[1] > 0.0) || parts[2] < parts[0]) throw UsageError("--u range needs step > 0 and stop >= start");
    return {parts[0], parts[1], parts[2]};
}

inline FocusGeometry geometry_of(const RunConfig& c) {
    FocusGeometry g;
    g.w_l = c.w_l;
    g.f = c.f;
    g.lambda = c.lambda;
    if (c.rho0 && c.na) throw UsageError("give either --rho0 or --na, not both");
    if (c.rho0) g.v = *c.rho0 / c.f;
    if (c.na) {
        if (!(*c.na > 0.0 && *c.na < 1.0)) throw UsageError("--na must be in (0, 1)");
        g.v = *c.na / std::sqrt(1.0 - *c.na * *c.na);
    }
    try {
        g.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return g;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// Every recorded setting, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> d = {
        {"command", command_name(c.command)},
        {"w_l_m", fmt(c.w_l)},
        {"f_m", fmt(c.f)},
        {"lambda_m", fmt(c.lambda)},
        {"rho0_m", c.rho0 ? fmt(*c.rho0) : "inf"},
        {"na", c.na ? fmt(*c.na) : "none"},
        {"format", c.format == OutputFormat::csv ? "csv" : "json"},
        {"grid_size", std::to_string(c.grid_size)},
        {"lens", c.lens},
        {"z_min_m", fmt(c.z_min)},
        {"z_max_m", fmt(c.z_max)},
        {"samples", std::to_string(c.samples)},
        {"rho_max_m", fmt(c.rho_max)},
        {"u_scan", fmt(c.u.start) + ":" + fmt(c.u.step) + ":" + fmt(c.u.stop)},
        {"aperture_over_waist", fmt(c.aperture_over_waist)},
        {"seed", c.seed ? std::to_string(*c.seed) : "none"},
        {"mc_samples", std::to_string(c.mc_samples)},
        {"temperature_k", fmt(c.temperature)},
        {"nu_rho_hz", fmt(c.nu_rho)},
        {"nu_z_hz", fmt(c.nu_z)},
        {"input", c.input.empty() ? "none" : c.input},
        {"linewidth_mhz", fmt(c.linewidth_mhz)},
        {"linewidth_threshold", fmt(c.linewidth_threshold)},
        {"u_lo", fmt(c.u_lo)},
        {"u_hi", fmt(c.u_hi)},
    };
    return d;
}

/// Tabular result; rendered as CSV with a `#` config header, or as JSON with
/// the config under "config".
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> summary;  // scalar results
    std::vector<std::string> notes;
};

inline void render(const RunConfig& c, const Table& t, std::ostream& out) {
    if (c.format == OutputFormat::csv) {
        out << "# tightfocus " << command_name(c.command) << '\n';
        for (const auto& [k, v] : describe(c)) out << "# " << k << " = " << v << '\n';
        for (const auto& [k, v] : t.summary) out << "# result " << k << " = " << fmt(v) << '\n';
        for (const auto& n : t.notes) out << "# note " << n << '\n';
        for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
            out << '\n';
        }
        return;
    }
    nlohmann::ordered_json j;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : describe(c)) cfg[k] = v;
    j["config"] = cfg;
    for (const auto& [k, v] : t.summary) j[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
    if (!t.notes.empty()) j["notes"] = t.notes;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        for (std::size_t i = 0; i < row.size(); ++i)
            r[t.columns[i]] = std::isfinite(row[i]) ? nlohmann::ordered_json(row[i]) : nullptr;
        rows.push_back(r);
    }
    j["rows"] = rows;
    out << j.dump(2) << '\n';
}

inline LensModel lens_of(const RunConfig& c) {
    if (c.lens == "spherical") return LensModel::spherical;
    if (c.lens == "parabolic") return LensModel::parabolic;
    throw UsageError("--lens must be spherical or parabolic");
}

inline std::vector<double> u_values(const UScan& s) {
    std::vector<double> v;
    const long n = static_cast<long>(std::floor((s.stop - s.start) / s.step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) {
        const double u = s.start + static_cast<double>(i) * s.step;
        if (u > 0.0) v.push_back(u);
    }
    return v;
}

inline Table run_field_axial(const RunConfig& c) {
    const FocusGeometry g = geometry_of(c);
    if (!(c.z_max > c.z_min)) throw UsageError("--z-max must exceed --z-min");
    if (c.samples < 3) throw UsageError("--samples must be >= 3");
    DecomposeOptions opt;
    opt.lens = lens_of(c);
    FieldEvaluator ev(decompose(g, c.grid_size, opt));
    const auto prof = axial_intensity_profile(ev, c.z_min, c.z_max, c.samples);
    Table t;
    t.columns = {"z_m", "intensity_plus"};
    for (const auto& [z, i] : prof.samples) t.rows.push_back({z, i});
    t.summary.emplace_back("fwhm_m", prof.fwhm ? *prof.fwhm : std::numeric_limits<double>::quiet_NaN());
    t.summary.emplace_back("paraxial_depth_of_field_m", 2.0 * g.lambda / (constants::pi * g.u() * g.u()));
    if (!prof.fwhm) t.notes.push_back("FWHM undefined: peak not interior to the z range");
    return t;
}

inline Table run_field_focal_plane(const RunConfig& c) {
    const FocusGeometry g = geometry_of(c);
    if (!(c.rho_max > 0.0)) throw UsageError("--rho-max must be > 0");
    if (c.samples < 3) throw UsageError("--samples must be >= 3");
    DecomposeOptions opt;
    opt.lens = lens_of(c);
    FieldEvaluator ev(decompose(g, c.grid_size, opt));
    const auto prof = focal_plane_profile(ev, 0.0, c.rho_max, c.samples);
    const double wf = g.paraxial_waist();
    Table t;
    t.columns = {"rho_m", "abs_plus", "abs_z", "abs_minus", "paraxial_abs_plus"};
    for (const auto& s : prof)
        t.rows.push_back({s.rho, s.abs_plus, s.abs_z, s.abs_minus,
                          g.w_l / wf * std::exp(-(s.rho / wf) * (s.rho / wf))});
    t.summary.emplace_back("paraxial_waist_m", wf);
    return t;
}

// Aperture used for the ε_aperture column of the scans.
inline double scan_aperture_v(const RunConfig& c, double u) {
    if (c.rho0) return *c.rho0 / c.f;
    if (c.na) return *c.na / std::sqrt(1.0 - *c.na * *c.na);
    return c.aperture_over_waist * u;
}

inline Table run_scan(const RunConfig& c, bool extinction_columns) {
    FocusGeometry base = geometry_of(c);
    if (!(c.aperture_over_waist > 0.0)) throw UsageError("--aperture-over-waist must be > 0");
    Table t;
    if (extinction_columns)
        t.columns = {"u", "r_sc", "eps_full_plane", "eps_fiber", "eps_aperture", "reflectivity_fiber",
                     "reflectivity_aperture", "aperture_v"};
    else
        t.columns = {"u", "r_sc", "eps_fiber", "eps_aperture", "reflectivity_fiber", "r_sc_paraxial"};
    for (double u : u_values(c.u)) {
        FocusGeometry g = base;
        g.w_l = u * g.f;
        g.v = std::numeric_limits<double>::infinity();
        const double r = scattering_ratio(g).r_sc;
        FocusGeometry ga = g;
        ga.v = scan_aperture_v(c, u);
        const auto ap = extinction_finite_aperture(ga);
        const auto fb = extinction_fiber(std::min(r, 2.0));
        if (extinction_columns)
            t.rows.push_back({u, r, extinction_full_plane(std::min(r, 2.0)).epsilon, fb.epsilon, ap.epsilon,
                              fb.reflectivity, ap.reflectivity, ga.v});
        else
            t.rows.push_back({u, r, fb.epsilon, ap.epsilon, fb.reflectivity, 3.0 * u * u});
    }
    return t;
}

struct Table1Row {
    double w_l_mm;
    double eps_measured_pct;
    double fwhm_measured_mhz;
};

inline const std::vector<Table1Row>& table1_rows() {
    static const std::vector<Table1Row> rows = {{0.5, 2.38, 7.1}, {1.1, 7.2, 7.4}, {1.3, 9.8, 7.5}, {1.4, 10.4, 7.7}};
    return rows;
}

inline Table run_table1(const RunConfig& c) {
    const FocusGeometry base = geometry_of(c);
    TrapThermalState trap;
    trap.temperature = c.temperature;
    trap.nu_rho = c.nu_rho;
    trap.nu_z = c.nu_z;
    try {
        trap.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    Table t;
    t.columns = {"w_l_mm", "u", "w_f_um", "r_sc", "eps_theo_pct", "motional_reduction_pct", "eps_motional_pct",
                 "eps_measured_pct", "theory_ge_measured"};
    if (c.seed) t.columns.push_back("motional_reduction_mc_pct");
    std::uint64_t stream = c.seed.value_or(0);
    for (const auto& row : table1_rows()) {
        FocusGeometry g = base;
        g.w_l = row.w_l_mm * 1e-3;
        g.v = std::numeric_limits<double>::infinity();
        const double r = scattering_ratio(g).r_sc;
        const double eps = extinction_fiber(r).epsilon;
        const auto mot = motional_correction(r, g, trap);
        const double eps_mot = extinction_fiber(mot.r_sc).epsilon;
        std::vector<double> out = {row.w_l_mm, g.u(), g.paraxial_waist() * 1e6, r, 100.0 * eps,
                                   100.0 * (1.0 - mot.factor), 100.0 * eps_mot, row.eps_measured_pct,
                                   100.0 * eps >= row.eps_measured_pct ? 1.0 : 0.0};
        if (c.seed) {
            const double mc = motional_monte_carlo(g, trap, c.mc_samples, stream++);
            out.push_back(100.0 * (1.0 - mc));
        }
        if (!mot.valid) t.notes.push_back("motional formula outside validity at w_l_mm=" + fmt(row.w_l_mm));
        t.rows.push_back(out);
    }
    t.summary.emplace_back("sigma_rho_m", trap.sigma_rho());
    t.summary.emplace_back("sigma_z_m", trap.sigma_z());
    t.notes.push_back("eps_measured_pct is the experimental column, reported for comparison only");
    return t;
}

inline Table run_optimum(const RunConfig& c) {
    if (!(c.u_lo > 0.0) || !(c.u_hi > c.u_lo)) throw UsageError("need 0 < --u-lo < --u-hi");
    const auto opt = find_optimal_focusing(c.u_lo, c.u_hi);
    Table t;
    t.columns = {"u_star", "r_sc_star", "eps_fiber_star", "on_boundary"};
    t.rows.push_back({opt.u_star, opt.r_star, extinction_fiber(std::min(opt.r_star, 2.0)).epsilon,
                      opt.on_boundary ? 1.0 : 0.0});
    if (opt.on_boundary) t.notes.push_back("maximum on the boundary of the search interval");
    return t;
}

inline Table run_fit_spectrum(const RunConfig& c) {
    if (c.input.empty()) throw UsageError("fit-spectrum needs --input");
    std::ifstream in(c.input);
    if (!in) throw UsageError("cannot open input file '" + c.input + "'");
    SpectrumRecord rec;
    try {
        rec = read_spectrum_csv(in);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (rec.points.size() < 5) throw UsageError("fit-spectrum needs at least 5 points");
    const auto fit = fit_lorentzian(rec);
    const auto lw = natural_linewidth_check(fit, c.linewidth_mhz, c.linewidth_threshold);
    Table t;
    t.columns = {"center_mhz", "fwhm_mhz", "t_min", "epsilon_max", "residual_rms"};
    t.rows.push_back({fit.center, fit.fwhm, fit.t_min, fit.epsilon_max(), fit.residual_rms});
    t.summary = {{"center_mhz", fit.center},
                 {"fwhm_mhz", fit.fwhm},
                 {"t_min", fit.t_min},
                 {"epsilon_max", fit.epsilon_max()},
                 {"residual_rms", fit.residual_rms},
                 {"center_sigma_mhz", fit.center_sigma()},
                 {"fwhm_sigma_mhz", fit.fwhm_sigma()},
                 {"t_min_sigma", fit.t_min_sigma()},
                 {"degenerate", fit.degenerate ? 1.0 : 0.0},
                 {"linewidth_ratio", lw.ratio},
                 {"linewidth_consistent", lw.consistent ? 1.0 : 0.0}};
    if (fit.degenerate) t.notes.push_back("no dip found: degenerate fit, fwhm at the data span");
    if (!lw.consistent) t.notes.push_back("fwhm exceeds the linewidth threshold");
    return t;
}

inline Table execute(const RunConfig& c) {
    switch (c.command) {
        case Command::field_axial: return run_field_axial(c);
        case Command::field_focal_plane: return run_field_focal_plane(c);
        case Command::rsc_scan: return run_scan(c, false);
        case Command::extinction_scan: return run_scan(c, true);
        case Command::table1: return run_table1(c);
        case Command::fit_spectrum: return run_fit_spectrum(c);
        case Command::optimum: return run_optimum(c);
    }
    throw UsageError("unknown command");
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Runs the command and writes its output; returns the process exit status.
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
    const std::string module = command_name(c.command);
    try {
        if (c.grid_size < 64) throw UsageError("--grid-size must be >= 64");
        const Table t = execute(c);
        std::ostringstream buf;
        render(c, t, buf);
        if (c.output == "-") {
            std::cout << buf.str();
        } else {
            std::ofstream out(c.output, std::ios::binary);
            if (!out) throw UsageError("cannot write output file '" + c.output + "'");
            out << buf.str();
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "tightfocus " << module << ": usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const numerics::NumericError& e) {
        err << "tightfocus " << module << ": numeric failure: " << e.what() << " (w_l=" << fmt(c.w_l)
            << " f=" << fmt(c.f) << " lambda=" << fmt(c.lambda) << ")\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        err << "tightfocus " << module << ": invalid parameters: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        err << "tightfocus " << module << ": numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace tightfocus::cli
