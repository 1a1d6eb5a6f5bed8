#pragma once

// Incident Gaussian beam, ideal-lens transformation and the field on the
// collection lens of a confocal pair.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "tightfocus/constants.hpp"

namespace tightfocus {

using cplx = std::complex<double>;

struct FocusGeometry {
    double w_l = 1.1e-3;      // input beam waist (m)
    double f = 4.5e-3;        // focal length (m)
    double lambda = 780e-9;   // wavelength (m)
    double v = std::numeric_limits<double>::infinity();  // aperture radius over f

    double u() const { return w_l / f; }
    double k() const { return 2.0 * constants::pi / lambda; }
    bool finite_aperture() const { return std::isfinite(v); }
    double aperture_radius() const { return v * f; }
    double na_squared() const { return finite_aperture() ? v * v / (1.0 + v * v) : 1.0; }
    double numerical_aperture() const { return std::sqrt(na_squared()); }
    double paraxial_waist() const { return lambda / (constants::pi * u()); }

    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!(x > 0.0) || !std::isfinite(x))
                throw std::invalid_argument(std::string("FocusGeometry: ") + name + " must be finite and > 0");
        };
        positive(w_l, "w_L");
        positive(f, "f");
        positive(lambda, "lambda");
        if (!(v > 0.0)) throw std::invalid_argument("FocusGeometry: v must be > 0 or infinite");
    }
};

/// Complex amplitudes along ε₊ = (x̂ + iŷ)/√2, ẑ and ε₋ = (x̂ − iŷ)/√2.
struct PolarizedField {
    cplx f_plus{};
    cplx f_z{};
    cplx f_minus{};

    double intensity() const { return std::norm(f_plus) + std::norm(f_z) + std::norm(f_minus); }

    PolarizedField operator*(cplx s) const { return {f_plus * s, f_z * s, f_minus * s}; }
    PolarizedField operator+(const PolarizedField& o) const {
        return {f_plus + o.f_plus, f_z + o.f_z, f_minus + o.f_minus};
    }
    PolarizedField operator-(const PolarizedField& o) const {
        return {f_plus - o.f_plus, f_z - o.f_z, f_minus - o.f_minus};
    }
};

struct CartesianField {
    cplx x{}, y{}, z{};
};

struct CylPoint {
    double rho = 0.0;
    double phi = 0.0;
    double z = 0.0;  // origin at the focus
};

inline CartesianField to_cartesian(const PolarizedField& f) {
    constexpr double r = 0.70710678118654752440;
    const cplx i(0.0, 1.0);
    return {r * (f.f_plus + f.f_minus), i * r * (f.f_plus - f.f_minus), f.f_z};
}

inline PolarizedField from_cartesian(const CartesianField& e) {
    constexpr double r = 0.70710678118654752440;
    const cplx i(0.0, 1.0);
    return {r * (e.x - i * e.y), e.z, r * (e.x + i * e.y)};
}

/// Σ a_c conj(b_c); the circular basis is orthonormal so this is the
/// Hermitian product of the Cartesian vectors.
inline cplx hermitian_product(const PolarizedField& a, const PolarizedField& b) {
    return a.f_plus * std::conj(b.f_plus) + a.f_z * std::conj(b.f_z) + a.f_minus * std::conj(b.f_minus);
}

enum class LensModel { spherical, parabolic };
enum class Helicity { plus, minus };

/// Unit vector (sinθ cosφ, sinθ sinφ, cosθ) in circular components.
inline PolarizedField unit_vector(double cos_theta, double sin_theta, double phi) {
    constexpr double r = 0.70710678118654752440;
    return {r * sin_theta * std::polar(1.0, -phi), cos_theta, r * sin_theta * std::polar(1.0, phi)};
}

/// ε₊-polarized Gaussian on the lens plane.
inline PolarizedField input_beam(const FocusGeometry& geom, const CylPoint& p) {
    const double s = p.rho / geom.w_l;
    return {std::exp(-s * s), 0.0, 0.0};
}

/// Field right after the ideal lens at (ρ, φ, −f): spherical phase plate,
/// polarization tilt toward the focus and the 1/√cosθ amplitude factor.
/// Zero beyond a finite aperture.
inline PolarizedField lens_transform(const FocusGeometry& geom, const CylPoint& p,
                                     LensModel model = LensModel::spherical,
                                     Helicity helicity = Helicity::plus) {
    if (geom.finite_aperture() && p.rho > geom.aperture_radius()) return {};
    const double s = p.rho / geom.w_l;
    const double envelope = std::exp(-s * s);
    const double k = geom.k();
    const double f = geom.f;

    if (model == LensModel::parabolic) {
        const cplx field = envelope * std::polar(1.0, -k * (f + p.rho * p.rho / (2.0 * f)));
        if (helicity == Helicity::plus) return {field, 0.0, 0.0};
        return {0.0, 0.0, field};
    }

    const double r = std::hypot(p.rho, f);
    const double c = f / r;
    const double sn = p.rho / r;
    const cplx common = std::sqrt(r / f) * envelope * std::polar(1.0, -k * r);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (helicity == Helicity::plus) {
        return {common * (0.5 * (1.0 + c)), common * (sn * inv_sqrt2) * std::polar(1.0, p.phi),
                common * (0.5 * (c - 1.0)) * std::polar(1.0, 2.0 * p.phi)};
    }
    return {common * (0.5 * (c - 1.0)) * std::polar(1.0, -2.0 * p.phi),
            common * (sn * inv_sqrt2) * std::polar(1.0, -p.phi), common * (0.5 * (1.0 + c))};
}

/// Excitation field (V/m) on the plane z = ±f of a confocal lens pair; the
/// sign of p.z selects the plane. θ is the polar angle measured from −ẑ, so
/// cosθ = −f/R after the focus and +f/R before it. The field after the focus
/// carries the phase e^{+i(kR − π/2)}, the one before it e^{−i(kR − π/2)}.
inline PolarizedField collection_plane_field(const FocusGeometry& geom, const CylPoint& p, double e_l) {
    if (p.z == 0.0) throw std::invalid_argument("collection_plane_field: z must be +f or -f");
    const double sign = p.z > 0.0 ? 1.0 : -1.0;
    const double r = std::hypot(p.rho, geom.f);
    const double cos_theta = -sign * geom.f / r;
    const double sin_theta = p.rho / r;
    const double s = p.rho / geom.w_l;
    const cplx common = e_l / std::sqrt(std::abs(cos_theta)) * std::exp(-s * s) *
                        std::polar(1.0, sign * (geom.k() * r - 0.5 * constants::pi));
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return {common * (0.5 * (1.0 - sign * cos_theta)),
            common * (-sign * sin_theta * inv_sqrt2) * std::polar(1.0, p.phi),
            common * (0.5 * (-sign * cos_theta - 1.0)) * std::polar(1.0, 2.0 * p.phi)};
}

}  // namespace tightfocus
