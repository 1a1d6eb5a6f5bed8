#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_app.hpp"

namespace tightfocus::cli {

struct ParseResult {
    std::optional<RunConfig> config;  // empty when the program should exit
    int exit_code = kExitOk;
};

/// Parses argv into a RunConfig. Help requests exit 0, bad flags exit 2.
inline ParseResult parse_command_line(int argc, const char* const* argv, std::ostream& out = std::cout,
                                      std::ostream& err = std::cerr) {
    CLI::App app{"Strong focusing of a Gaussian beam onto a single atom: fields, scattering ratio, extinction"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all commands");

    RunConfig cfg;
    std::string w_l, f = "4.5mm", lambda = "780nm", rho0, z_min, z_max, rho_max, u_scan, format;
    std::optional<double> na;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub, bool geometry) {
        if (geometry) {
            sub->add_option("--w-l,--wl", w_l, "Input beam waist, e.g. 1.1mm");
            sub->add_option("--f", f, "Focal length, e.g. 4.5mm")->capture_default_str();
            sub->add_option("--lambda", lambda, "Wavelength, e.g. 780nm")->capture_default_str();
            sub->add_option("--rho0", rho0, "Lens aperture radius (default: unobstructed)");
            sub->add_option("--na", na, "Lens numerical aperture, instead of --rho0");
        }
        sub->add_option("-o,--output", cfg.output, "Output path, '-' for stdout")->capture_default_str();
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* axial = app.add_subcommand("field-axial", "On-axis intensity |F+|^2 and its FWHM");
    add_common(axial, true);
    axial->add_option("--z-min", z_min, "Start of the z range, e.g. -15um");
    axial->add_option("--z-max", z_max, "End of the z range, e.g. 15um");
    axial->add_option("--samples", cfg.samples, "Number of samples")->capture_default_str();
    axial->add_option("--grid-size", cfg.grid_size, "Mode quadrature nodes")->capture_default_str();
    axial->add_option("--lens", cfg.lens, "Lens model")->check(CLI::IsMember({"spherical", "parabolic"}));

    auto* focal = app.add_subcommand("field-focal-plane", "Field components across the focal plane");
    add_common(focal, true);
    focal->add_option("--rho-max", rho_max, "Largest radius, e.g. 5um");
    focal->add_option("--samples", cfg.samples, "Number of samples")->capture_default_str();
    focal->add_option("--grid-size", cfg.grid_size, "Mode quadrature nodes")->capture_default_str();
    focal->add_option("--lens", cfg.lens, "Lens model")->check(CLI::IsMember({"spherical", "parabolic"}));

    auto* rsc = app.add_subcommand("rsc-scan", "Scattering ratio and extinction over a u grid");
    add_common(rsc, true);
    rsc->add_option("--u", u_scan, "start:step:stop");
    rsc->add_option("--aperture-over-waist", cfg.aperture_over_waist, "rho0/w_L for the aperture column")
        ->capture_default_str();

    auto* ext = app.add_subcommand("extinction-scan", "Extinction and reflectivity over a u grid");
    add_common(ext, true);
    ext->add_option("--u", u_scan, "start:step:stop");
    ext->add_option("--aperture-over-waist", cfg.aperture_over_waist, "rho0/w_L for the aperture column")
        ->capture_default_str();

    auto* table = app.add_subcommand("table1", "Theoretical columns for the four measured input waists");
    add_common(table, true);
    table->add_option("--seed", seed, "Seed for the Monte Carlo motional average (enables it)");
    table->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples")->capture_default_str();
    table->add_option("--temperature", cfg.temperature, "Atom temperature (K)")->capture_default_str();
    table->add_option("--nu-rho", cfg.nu_rho, "Radial trap frequency (Hz)")->capture_default_str();
    table->add_option("--nu-z", cfg.nu_z, "Axial trap frequency (Hz)")->capture_default_str();

    auto* fit = app.add_subcommand("fit-spectrum", "Lorentzian fit of a transmission spectrum CSV");
    add_common(fit, false);
    fit->add_option("-i,--input", cfg.input, "CSV with detuning_mhz,transmission[,sigma]")->required();
    fit->add_option("--linewidth", cfg.linewidth_mhz, "Natural linewidth (MHz)")->capture_default_str();
    fit->add_option("--linewidth-threshold", cfg.linewidth_threshold, "Largest fwhm/linewidth accepted")
        ->capture_default_str();

    auto* optimum = app.add_subcommand("optimum", "Focusing strength that maximizes R_sc");
    add_common(optimum, false);
    optimum->add_option("--u-lo", cfg.u_lo, "Lower end of the search")->capture_default_str();
    optimum->add_option("--u-hi", cfg.u_hi, "Upper end of the search")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
    }

    try {
        for (auto* sub : app.get_subcommands()) cfg.command = command_names().at(sub->get_name());
        if (!w_l.empty()) cfg.w_l = parse_length(w_l);
        cfg.f = parse_length(f);
        cfg.lambda = parse_length(lambda);
        if (!rho0.empty()) cfg.rho0 = parse_length(rho0);
        cfg.na = na;
        cfg.seed = seed;
        if (!z_min.empty()) cfg.z_min = parse_length(z_min);
        if (!z_max.empty()) cfg.z_max = parse_length(z_max);
        if (!rho_max.empty()) cfg.rho_max = parse_length(rho_max);
        if (!u_scan.empty()) cfg.u = parse_u_scan(u_scan);
        if (format.empty()) format = cfg.command == Command::fit_spectrum ? "json" : "csv";
        cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    } catch (const UsageError& e) {
        err << "tightfocus: usage error: " << e.what() << '\n';
        return {std::nullopt, kExitUsage};
    }
    return {cfg, kExitOk};
}

}  // namespace tightfocus::cli
