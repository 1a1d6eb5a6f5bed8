#pragma once

// Two-level atom driven at the focus: steady-state population, scattered
// power and the scattering ratio R_sc = P_sc/P_in.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "tightfocus/constants.hpp"
#include "tightfocus/green_focus.hpp"
#include "tightfocus/lens_field.hpp"
#include "tightfocus/numerics/special_functions.hpp"

namespace tightfocus {

struct AtomParams {
    double gamma = 0.0;     // excited-state decay rate Γ (rad/s)
    double omega_12 = 0.0;  // transition angular frequency (rad/s)
    double dipole = 0.0;    // |d12| (C m)

    /// Γ = ω³|d|²/(3πε₀ħc³)
    static double decay_rate(double omega_12, double dipole) {
        using namespace constants;
        return omega_12 * omega_12 * omega_12 * dipole * dipole /
               (3.0 * pi * vacuum_permittivity * hbar * speed_of_light * speed_of_light * speed_of_light);
    }

    static AtomParams from_linewidth(double gamma, double wavelength) {
        using namespace constants;
        AtomParams a;
        a.gamma = gamma;
        a.omega_12 = 2.0 * pi * speed_of_light / wavelength;
        a.dipole = std::sqrt(gamma * 3.0 * pi * vacuum_permittivity * hbar * speed_of_light * speed_of_light *
                             speed_of_light / (a.omega_12 * a.omega_12 * a.omega_12));
        return a;
    }

    static AtomParams rb87_d2() {
        return from_linewidth(2.0 * constants::pi * constants::rb87::d2_linewidth_mhz * 1e6,
                              constants::rb87::d2_wavelength);
    }

    double wavelength() const { return 2.0 * constants::pi * constants::speed_of_light / omega_12; }

    void validate() const {
        if (!(gamma > 0.0) || !(omega_12 > 0.0) || !(dipole > 0.0))
            throw std::invalid_argument("AtomParams: gamma, omega_12 and dipole must be > 0");
        const double g = decay_rate(omega_12, dipole);
        if (std::abs(g - gamma) > 1e-10 * gamma)
            throw std::invalid_argument("AtomParams: gamma inconsistent with omega_12 and dipole");
    }
};

struct DriveParams {
    double rabi = 0.0;      // Ω = E_A|d12|/ħ (rad/s)
    double detuning = 0.0;  // δ = ω − ω12 (rad/s)
};

/// ρ22 = (Ω²/4)/(δ² + Ω²/2 + Γ²/4)
inline double excited_population(const AtomParams& atom, const DriveParams& drive) {
    if (!(drive.rabi >= 0.0)) throw std::invalid_argument("excited_population: rabi must be >= 0");
    if (std::isinf(drive.rabi)) return 0.5;
    const double o2 = drive.rabi * drive.rabi;
    return 0.25 * o2 / (drive.detuning * drive.detuning + 0.5 * o2 + 0.25 * atom.gamma * atom.gamma);
}

/// P_sc = ρ22 Γ ħ ω12
inline double scattered_power(const AtomParams& atom, const DriveParams& drive) {
    return excited_population(atom, drive) * atom.gamma * constants::hbar * atom.omega_12;
}

/// Weak resonant drive: P_sc = 3ε₀cλ²E_A²/(4π).
inline double weak_field_scattered_power(double e_a, double wavelength) {
    using namespace constants;
    return 3.0 * vacuum_permittivity * speed_of_light * wavelength * wavelength * e_a * e_a / (4.0 * pi);
}

inline double rabi_frequency(const AtomParams& atom, double e_a) { return e_a * atom.dipole / constants::hbar; }

struct ScatterResult {
    double r_sc = 0.0;           // P_sc/P_in
    double p_sc_over_pin = 0.0;  // same quantity under weak resonant drive
    double focal_ratio = 0.0;    // (E_A/E_L)²
};

/// R_sc(u) = 3/(4u³)·e^{2/u²}[Γ(−1/4,1/u²) + uΓ(1/4,1/u²)]².
inline double scattering_ratio(double u) {
    if (!(u > 0.0)) throw std::invalid_argument("scattering_ratio: u must be > 0");
    const double x = 1.0 / (u * u);
    const double b = numerics::scaled_incomplete_gamma(-0.25, x) + u * numerics::scaled_incomplete_gamma(0.25, x);
    return 0.75 * b * b / (u * u * u);
}

/// Ratio of scattered to input power for a weak resonant probe, and |E_A/E_L|².
inline ScatterResult scattering_ratio(const FocusGeometry& geom) {
    geom.validate();
    const double r = scattering_ratio(geom.u());
    const double conv = constants::pi * constants::pi * geom.w_l * geom.w_l / (3.0 * geom.lambda * geom.lambda);
    return {r, r, r * conv};
}

/// Same with the first lens obstructed at ρ₀ = v f:
/// R = 3/(4u)[G(1/u²) − e^{−v²/u²}G((1+v²)/u²)]².
inline ScatterResult scattering_ratio_finite(const FocusGeometry& geom) {
    geom.validate();
    if (!geom.finite_aperture()) return scattering_ratio(geom);
    const double u = geom.u();
    const double x = 1.0 / (u * u);
    const double d = geom.v * geom.v * x;
    const double e = std::exp(-d);
    const double b = detail::green_bracket(x, u) - (e == 0.0 ? 0.0 : e * detail::green_bracket(x + d, u));
    const double r = 0.75 * b * b / u;
    const double conv = constants::pi * constants::pi * geom.w_l * geom.w_l / (3.0 * geom.lambda * geom.lambda);
    return {r, r, r * conv};
}

struct OptimumResult {
    double u_star = 0.0;
    double r_star = 0.0;
    bool on_boundary = false;  // maximum sits at an end of the search interval
};

/// Golden-section maximization of R_sc(u) over [u_lo, u_hi].
inline OptimumResult find_optimal_focusing(double u_lo, double u_hi, double tolerance = 1e-4) {
    if (!(u_lo > 0.0) || !(u_hi > u_lo)) throw std::invalid_argument("find_optimal_focusing: need 0 < u_lo < u_hi");
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = u_lo, b = u_hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = scattering_ratio(c), fd = scattering_ratio(d);
    while (b - a > tolerance) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = scattering_ratio(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = scattering_ratio(d);
        }
    }
    OptimumResult res;
    res.u_star = 0.5 * (a + b);
    res.r_star = scattering_ratio(res.u_star);
    res.on_boundary = (res.u_star - u_lo) <= 2.0 * tolerance || (u_hi - res.u_star) <= 2.0 * tolerance;
    if (res.on_boundary) {
        res.u_star = (res.u_star - u_lo) < (u_hi - res.u_star) ? u_lo : u_hi;
        res.r_star = scattering_ratio(res.u_star);
    }
    return res;
}

}  // namespace tightfocus
