#pragma once

// Transmission observables: dipole far field, energy flux through the lens
// planes, extinction for different collection optics, and the reduction of
// R_sc by thermal motion of the atom.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "tightfocus/constants.hpp"
#include "tightfocus/lens_field.hpp"
#include "tightfocus/numerics/quadrature.hpp"
#include "tightfocus/scattering.hpp"

namespace tightfocus {

/// Far field of the circularly rotating dipole driven by an ε₊ focal field of
/// real amplitude e_a:
///   E = (3E_A e^{i(kr+π/2)}/(2kr)) [ε₊ − (ε₊·r̂) r̂].
inline PolarizedField dipole_far_field(double e_a, double wavelength, const CylPoint& p) {
    const double r = std::hypot(p.rho, p.z);
    if (!(r >= 100.0 * wavelength))
        throw std::domain_error("dipole_far_field: point closer than 100 wavelengths to the dipole");
    const double k = 2.0 * constants::pi / wavelength;
    const double st = p.rho / r;
    const double ct = p.z / r;
    const cplx amp = 1.5 * e_a / (k * r) * std::polar(1.0, k * r + 0.5 * constants::pi);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return {amp * (1.0 - 0.5 * st * st), amp * (-st * ct * inv_sqrt2) * std::polar(1.0, p.phi),
            amp * (-0.5 * st * st) * std::polar(1.0, 2.0 * p.phi)};
}

enum class FluxPlane { before_focus, after_focus };

struct FluxBreakdown {
    double input_term = 0.0;         // W
    double scattered_term = 0.0;     // W, negative before the focus (flows back)
    double interference_term = 0.0;  // W
    FluxPlane plane = FluxPlane::after_focus;

    double total() const { return input_term + scattered_term + interference_term; }
};

struct FluxOptions {
    double relative_tolerance = 1e-10;
    int phi_points = 16;  // trapezoid in φ, exact for the e^{imφ} content here
};

/// Terms of the time-averaged flux (ε₀c/2)∫Re{E·E*} k̂_F·ẑ dA through the
/// plane z = ±f of an unobstructed confocal pair, with E = E_F + E_sc.
/// The plane is parametrized by the angle θ seen from the focus, ρ = f tanθ,
/// which keeps the slowly decaying scattered term on a finite interval.
inline FluxBreakdown flux_breakdown(const FocusGeometry& geom, double e_a, double e_l, FluxPlane plane,
                                    const FluxOptions& opt = {}) {
    geom.validate();
    const double f = geom.f;
    const double z = plane == FluxPlane::after_focus ? f : -f;
    const double pref = 0.5 * constants::vacuum_permittivity * constants::speed_of_light;
    const int n_phi = opt.phi_points;
    const double dphi = 2.0 * constants::pi / n_phi;

    enum class Term { input, scattered, interference };
    auto integrand = [&](Term term) {
        return [&, term](double theta) -> cplx {
            const double c = std::cos(theta);
            const double rho = f * std::tan(theta);
            // dA k̂·ẑ = ρ dρ dφ cosθ = f² sinθ/cos²θ dθ dφ
            const double jac = f * f * std::sin(theta) / (c * c);
            double acc = 0.0;
            for (int j = 0; j < n_phi; ++j) {
                const CylPoint p{rho, j * dphi, z};
                switch (term) {
                    case Term::input: {
                        acc += collection_plane_field(geom, p, e_l).intensity();
                        break;
                    }
                    case Term::scattered: {
                        acc += dipole_far_field(e_a, geom.lambda, p).intensity();
                        break;
                    }
                    case Term::interference: {
                        const PolarizedField ef = collection_plane_field(geom, p, e_l);
                        const PolarizedField es = dipole_far_field(e_a, geom.lambda, p);
                        const cplx a = hermitian_product(es, ef);
                        const cplx b = hermitian_product(ef, es);
                        acc += plane == FluxPlane::after_focus ? std::real(a + b) : std::real(a - b);
                        break;
                    }
                }
            }
            return pref * jac * acc * dphi;
        };
    };

    numerics::QuadratureSpec spec;
    spec.relative_tolerance = opt.relative_tolerance;
    spec.absolute_tolerance = 1e-300;
    spec.truncation_radius = 0.5 * constants::pi;
    FluxBreakdown out;
    out.plane = plane;
    out.input_term = std::real(numerics::integrate_radial(integrand(Term::input), spec));
    const double sc = std::real(numerics::integrate_radial(integrand(Term::scattered), spec));
    out.scattered_term = plane == FluxPlane::after_focus ? sc : -sc;
    if (plane == FluxPlane::after_focus) {
        out.interference_term = std::real(numerics::integrate_radial(integrand(Term::interference), spec));
    } else {
        // E_sc·E_F* − E_F·E_sc* is imaginary point by point; evaluate it anyway
        spec.absolute_tolerance = 1e-30;
        out.interference_term = std::real(numerics::integrate_radial(integrand(Term::interference), spec));
    }
    return out;
}

enum class Collection { full_plane, finite_aperture, fiber_mode };

struct ExtinctionResult {
    double epsilon = 0.0;
    double reflectivity = 0.0;
    Collection collection = Collection::full_plane;
    double v = std::numeric_limits<double>::infinity();  // collection aperture for finite_aperture
};

/// Infinite collection lens: ε = R_sc/2.
inline ExtinctionResult extinction_full_plane(double r_sc) {
    if (!(r_sc >= 0.0 && r_sc <= 2.0)) throw std::invalid_argument("extinction_full_plane: r_sc outside [0, 2]");
    return {0.5 * r_sc, 0.0, Collection::full_plane};
}

/// Pickup factor α = (1 + 3v²/4)/(1 + v²)^{3/2}.
inline double pickup_factor(double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("pickup_factor: v must be >= 0");
    if (std::isinf(v)) return 0.0;
    const double v2 = v * v;
    return (1.0 + 0.75 * v2) / std::pow(1.0 + v2, 1.5);
}

/// Same factor as a function of the numerical aperture: (1 − NA²/4)√(1 − NA²).
inline double pickup_factor_na(double na) {
    if (!(na >= 0.0 && na <= 1.0)) throw std::invalid_argument("pickup_factor_na: NA outside [0, 1]");
    const double n2 = na * na;
    return (1.0 - 0.25 * n2) * std::sqrt(1.0 - n2);
}

/// Focusing lens of radius ρ₀ = v f, collection lens of radius v_c f.
///   ε = ((1+α(v_c))/2) R_sc^{ρ₀} / (1 − e^{−2v²/u²}),   reflectivity ((1−α(v_c))/2) R_sc^{ρ₀}.
/// The denominator normalizes to the power passing the empty aperture.
inline ExtinctionResult extinction_finite_aperture(const FocusGeometry& geom, double collection_v) {
    geom.validate();
    if (!geom.finite_aperture()) throw std::invalid_argument("extinction_finite_aperture: needs a finite aperture");
    const double r = scattering_ratio_finite(geom).r_sc;
    const double alpha = pickup_factor(collection_v);
    const double ratio = geom.v / geom.u();
    const double transmitted = -std::expm1(-2.0 * ratio * ratio);
    ExtinctionResult out;
    out.epsilon = 0.5 * (1.0 + alpha) * r / transmitted;
    out.reflectivity = 0.5 * (1.0 - alpha) * r;
    out.collection = Collection::finite_aperture;
    out.v = collection_v;
    return out;
}

/// Identical focusing and collection lenses of radius ρ₀ = v f.
inline ExtinctionResult extinction_finite_aperture(const FocusGeometry& geom) {
    return extinction_finite_aperture(geom, geom.v);
}

/// Collection into the mode of the input fiber: 1 − ε = (1 − R_sc/2)², R = R_sc²/4.
inline ExtinctionResult extinction_fiber(double r_sc) {
    if (!(r_sc >= 0.0 && r_sc <= 2.0)) throw std::invalid_argument("extinction_fiber: r_sc outside [0, 2]");
    const double t = 1.0 - 0.5 * r_sc;
    return {1.0 - t * t, 0.25 * r_sc * r_sc, Collection::fiber_mode};
}

struct TrapThermalState {
    double temperature = 100e-6;  // K
    double nu_rho = 70e3;         // Hz
    double nu_z = 20e3;           // Hz
    double mass = constants::rb87::mass;

    static double spread(double temperature, double mass, double nu) {
        const double w = 2.0 * constants::pi * nu;
        return std::sqrt(constants::boltzmann * temperature / (mass * w * w));
    }
    double sigma_rho() const { return spread(temperature, mass, nu_rho); }
    double sigma_z() const { return spread(temperature, mass, nu_z); }

    void validate() const {
        if (!(temperature >= 0.0) || !(nu_rho > 0.0) || !(nu_z > 0.0) || !(mass > 0.0))
            throw std::invalid_argument("TrapThermalState: need T >= 0 and positive frequencies and mass");
    }
};

struct MotionalCorrection {
    double r_sc = 0.0;   // corrected scattering ratio
    double factor = 1.0; // R_sc'/R_sc
    bool valid = true;   // σ_ρ < w_f/√2, where the expansion holds
};

/// Paraxial reduction of R_sc for an atom spread over the focus:
///   R_sc' = R_sc (1 − 2σ_ρ²/w_f²)(1 − σ_z²λ²/(π²w_f⁴)),
/// with w_f the paraxial waist and σ_ρ the RMS radial displacement.
inline MotionalCorrection motional_correction(double r_sc, const FocusGeometry& geom, const TrapThermalState& trap) {
    geom.validate();
    trap.validate();
    const double wf = geom.paraxial_waist();
    const double sr = trap.sigma_rho();
    const double sz = trap.sigma_z();
    MotionalCorrection out;
    out.factor = (1.0 - 2.0 * sr * sr / (wf * wf)) *
                 (1.0 - sz * sz * geom.lambda * geom.lambda / (constants::pi * constants::pi * wf * wf * wf * wf));
    out.r_sc = r_sc * out.factor;
    out.valid = sr < wf / std::sqrt(2.0);
    return out;
}

/// Monte Carlo average of the paraxial Gaussian-beam intensity
/// (w_f/w(z))² exp(−2ρ²/w(z)²) over a thermal cloud; σ_ρ is split evenly
/// over x and y. Returns the mean of I/I(0).
template <class Rng>
double motional_monte_carlo(const FocusGeometry& geom, const TrapThermalState& trap, long samples, Rng& rng) {
    geom.validate();
    trap.validate();
    if (samples < 1) throw std::invalid_argument("motional_monte_carlo: samples must be >= 1");
    const double wf = geom.paraxial_waist();
    const double zr = constants::pi * wf * wf / geom.lambda;
    std::normal_distribution<double> transverse(0.0, trap.sigma_rho() / std::sqrt(2.0));
    std::normal_distribution<double> axial(0.0, trap.sigma_z());
    double sum = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double x = transverse(rng);
        const double y = transverse(rng);
        const double z = axial(rng);
        const double s = 1.0 + (z / zr) * (z / zr);
        sum += std::exp(-2.0 * (x * x + y * y) / (wf * wf * s)) / s;
    }
    return sum / static_cast<double>(samples);
}

inline double motional_monte_carlo(const FocusGeometry& geom, const TrapThermalState& trap, long samples,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return motional_monte_carlo(geom, trap, samples, rng);
}

}  // namespace tightfocus
