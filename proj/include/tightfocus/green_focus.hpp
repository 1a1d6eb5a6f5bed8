#pragma once

// Closed-form focal amplitude from the Green-theorem propagation of the
// lens-plane field, for an unobstructed lens and for a hard aperture.

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "tightfocus/constants.hpp"
#include "tightfocus/lens_field.hpp"
#include "tightfocus/numerics/quadrature.hpp"
#include "tightfocus/numerics/special_functions.hpp"

namespace tightfocus {

/// E_A/E_L at the focus. The polarization is pure ε₊.
struct FocalAmplitude {
    cplx ratio{};
    std::optional<double> absolute;  // |E_A| in V/m once an input power is supplied
};

namespace detail {

// e^t[Γ(1/4,t) + Γ(-1/4,t)/u]
inline double green_bracket(double t, double u) {
    return numerics::scaled_incomplete_gamma(0.25, t) + numerics::scaled_incomplete_gamma(-0.25, t) / u;
}

}  // namespace detail

/// F(0) = −i(kf/4)e^{1/u²}[u^{-1/2} Γ(−1/4, 1/u²) + u^{1/2} Γ(1/4, 1/u²)].
inline FocalAmplitude focal_field_infinite(const FocusGeometry& geom) {
    geom.validate();
    const double u = geom.u();
    const double x = 1.0 / (u * u);
    const double bracket = numerics::scaled_incomplete_gamma(-0.25, x) / std::sqrt(u) +
                           std::sqrt(u) * numerics::scaled_incomplete_gamma(0.25, x);
    return {cplx(0.0, -0.25 * geom.k() * geom.f * bracket), std::nullopt};
}

/// Focal amplitude behind a lens of radius ρ₀ = v·f. The usual closed form
/// mixes Γ(1/4,·), Γ(3/4,·) and a boundary term that cancel strongly at small
/// u. Eliminating Γ(3/4,t) with Γ(3/4,t) = −Γ(−1/4,t)/4 + t^{−1/4}e^{−t}
/// absorbs the boundary term and leaves
///   −i(kf√u/4)[G(1/u²) − e^{−v²/u²} G((1+v²)/u²)],
///   G(t) = e^t[Γ(1/4,t) + Γ(−1/4,t)/u],
/// with no cancellation. The −i matches the unobstructed case.
inline FocalAmplitude focal_field_finite(const FocusGeometry& geom) {
    geom.validate();
    if (!geom.finite_aperture()) return focal_field_infinite(geom);
    const double u = geom.u();
    const double x = 1.0 / (u * u);
    const double d = geom.v * geom.v * x;
    const double outer = detail::green_bracket(x, u);
    const double inner = std::exp(-d) == 0.0 ? 0.0 : std::exp(-d) * detail::green_bracket(x + d, u);
    return {cplx(0.0, -0.25 * geom.k() * geom.f * std::sqrt(u) * (outer - inner)), std::nullopt};
}

/// Dispatches on the aperture.
inline FocalAmplitude focal_field(const FocusGeometry& geom) {
    return geom.finite_aperture() ? focal_field_finite(geom) : focal_field_infinite(geom);
}

/// Peak field of the collimated input beam, E_L = (1/w_L)√(4P/(ε₀πc)).
inline double input_peak_field(double power, const FocusGeometry& geom) {
    if (!(power > 0.0)) throw std::invalid_argument("input power must be > 0");
    return std::sqrt(4.0 * power / (constants::vacuum_permittivity * constants::pi * constants::speed_of_light)) /
           geom.w_l;
}

/// Input power carrying peak field e_l, P = ε₀πc E_L² w_L²/4.
inline double input_power(double e_l, const FocusGeometry& geom) {
    return 0.25 * constants::vacuum_permittivity * constants::pi * constants::speed_of_light * e_l * e_l *
           geom.w_l * geom.w_l;
}

/// |E_A| in V/m for the given input power.
inline double restore_dimensions(const FocalAmplitude& amp, double power, const FocusGeometry& geom) {
    return std::abs(amp.ratio) * input_peak_field(power, geom);
}

inline FocalAmplitude with_power(FocalAmplitude amp, double power, const FocusGeometry& geom) {
    amp.absolute = restore_dimensions(amp, power, geom);
    return amp;
}

/// Focal amplitude by direct quadrature of the lens-plane Green integral,
/// (−ik√f/2)∫ρ(f+R)/R^{5/2} e^{−ρ²/w_L²} dρ up to ρ₀, or to infinity without an aperture.
inline cplx focal_field_quadrature(const FocusGeometry& geom, double relative_tolerance = 1e-12) {
    geom.validate();
    const double f = geom.f;
    const double w = geom.w_l;
    numerics::QuadratureSpec spec;
    spec.relative_tolerance = relative_tolerance;
    spec.truncation_radius = geom.finite_aperture() ? geom.aperture_radius() : std::numeric_limits<double>::infinity();
    auto integrand = [&](double rho) -> cplx {
        const double r2 = f * f + rho * rho;
        const double r = std::sqrt(r2);
        return rho * (f + r) / (r2 * std::pow(r, 0.5)) * std::exp(-rho * rho / (w * w));
    };
    const cplx integral = numerics::integrate_radial(integrand, spec);
    return cplx(0.0, -0.5 * geom.k() * std::sqrt(f)) * integral;
}

}  // namespace tightfocus
