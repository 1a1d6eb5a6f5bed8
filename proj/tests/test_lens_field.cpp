#include <gtest/gtest.h>

#include <random>

#include "tightfocus/lens_field.hpp"
#include "tightfocus/numerics/quadrature.hpp"

using namespace tightfocus;

namespace {

// Cartesian components straight from the definitions ε± = (x̂ ± iŷ)/√2.
std::array<cplx, 3> cartesian(const PolarizedField& f) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    return {r * (f.f_plus + f.f_minus), i * r * (f.f_plus - f.f_minus), f.f_z};
}

double norm3(const std::array<cplx, 3>& a) { return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2])); }

}  // namespace

TEST(FocusGeometry, DerivedQuantities) {
    FocusGeometry g;
    EXPECT_DOUBLE_EQ(g.u(), 1.1 / 4.5);
    EXPECT_NEAR(g.paraxial_waist(), 780e-9 / (M_PI * g.u()), 1e-20);
    EXPECT_EQ(g.na_squared(), 1.0);
    g.v = 0.5;
    EXPECT_NEAR(g.na_squared(), 0.2, 1e-15);
    EXPECT_NEAR(g.aperture_radius(), 2.25e-3, 1e-18);
    FocusGeometry bad;
    bad.w_l = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = FocusGeometry{};
    bad.v = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = FocusGeometry{};
    bad.lambda = std::nan("");
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(InputBeam, Examples) {
    FocusGeometry g;
    EXPECT_EQ(input_beam(g, {0, 0, -g.f}).f_plus, 1.0);
    EXPECT_NEAR(input_beam(g, {g.w_l, 1.0, -g.f}).f_plus.real(), std::exp(-1.0), 1e-16);
    EXPECT_LT(std::abs(input_beam(g, {5.26 * g.w_l, 0, -g.f}).f_plus), 1e-12);
    EXPECT_EQ(input_beam(g, {0.3e-3, 0, -g.f}).f_z, 0.0);
}

TEST(LensTransform, OnAxis) {
    FocusGeometry g;
    const auto F = lens_transform(g, {0, 0.3, -g.f});
    EXPECT_LT(std::abs(F.f_plus - std::polar(1.0, -g.k() * g.f)), 1e-12);
    EXPECT_EQ(std::abs(F.f_z), 0.0);
    EXPECT_EQ(std::abs(F.f_minus), 0.0);
}

TEST(LensTransform, FortyFiveDegrees) {
    FocusGeometry g;
    g.w_l = 3e-3;
    const double f = g.f;
    const auto F = lens_transform(g, {f, 0.0, -f});
    const double env = std::exp(-f * f / (g.w_l * g.w_l));
    const cplx common = std::pow(2.0, 0.25) * env * std::polar(1.0, -g.k() * f * std::sqrt(2.0));
    const double c = std::sqrt(0.5);
    // kR ≈ 5e4 rad, so the phase itself is only good to ~1e-11
    const double tol = 1e-10 * std::abs(common);
    EXPECT_LT(std::abs(F.f_plus - common * (1 + c) / 2.0), tol);
    EXPECT_LT(std::abs(F.f_z - common * (c / std::sqrt(2.0))), tol);
    EXPECT_LT(std::abs(F.f_minus - common * (c - 1) / 2.0), tol);
    EXPECT_NEAR(F.intensity(), env * env / c, 1e-12);
}

TEST(LensTransform, HardAperture) {
    FocusGeometry g;
    g.v = 0.2;
    EXPECT_EQ(lens_transform(g, {0.91e-3, 0, -g.f}).intensity(), 0.0);
    EXPECT_GT(lens_transform(g, {0.89e-3, 0, -g.f}).intensity(), 0.0);
}

TEST(LensTransform, TransverseToRays) {
    FocusGeometry g;
    g.w_l = 5e-3;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dr(0.0, 20e-3), dp(-M_PI, M_PI);
    for (int i = 0; i < 200; ++i) {
        const double rho = dr(rng), phi = dp(rng);
        for (auto h : {Helicity::plus, Helicity::minus}) {
            const auto e = cartesian(lens_transform(g, {rho, phi, -g.f}, LensModel::spherical, h));
            const double R = std::hypot(rho, g.f);
            const std::array<double, 3> dir = {-rho * std::cos(phi) / R, -rho * std::sin(phi) / R, g.f / R};
            const cplx dot = e[0] * dir[0] + e[1] * dir[1] + e[2] * dir[2];
            EXPECT_LE(std::abs(dot), 1e-12 * norm3(e) + 1e-300) << rho << " " << phi;
        }
    }
}

TEST(LensTransform, AzimuthalInvariance) {
    FocusGeometry g;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dp(-M_PI, M_PI);
    for (double rho : {0.1e-3, 0.7e-3, 1.5e-3, 3e-3, 6e-3}) {
        const double ref = lens_transform(g, {rho, 0.0, -g.f}).intensity();
        for (int i = 0; i < 10; ++i)
            EXPECT_NEAR(lens_transform(g, {rho, dp(rng), -g.f}).intensity(), ref, 1e-14 * ref);
    }
}

TEST(LensTransform, PowerConservedAcrossLens) {
    for (double w : {0.5e-3, 4e-3, 10e-3}) {
        FocusGeometry g;
        g.w_l = w;
        numerics::QuadratureSpec spec;
        spec.relative_tolerance = 1e-11;
        const cplx out = numerics::integrate_radial(
            [&](double rho) {
                const double cos_theta = g.f / std::hypot(rho, g.f);
                return cplx(2 * M_PI * rho * lens_transform(g, {rho, 0, -g.f}).intensity() * cos_theta);
            },
            spec);
        const cplx in = numerics::integrate_radial(
            [&](double rho) { return cplx(2 * M_PI * rho * input_beam(g, {rho, 0, -g.f}).intensity()); }, spec);
        EXPECT_NEAR(out.real(), in.real(), 1e-10 * in.real());
        EXPECT_NEAR(in.real(), M_PI * w * w / 2, 1e-10 * in.real());
    }
}

TEST(LensTransform, ParaxialLimit) {
    FocusGeometry g;
    g.w_l = 0.02 * g.f;
    double num = 0, den = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const double rho = 2 * g.w_l * (i + 0.5) / n;
        const auto sph = lens_transform(g, {rho, 0, -g.f}, LensModel::spherical);
        const auto par = lens_transform(g, {rho, 0, -g.f}, LensModel::parabolic);
        num += rho * std::norm(sph.f_plus - par.f_plus);
        den += rho * std::norm(par.f_plus);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-3);
}

TEST(LensTransform, HelicityMirror) {
    FocusGeometry g;
    for (double rho : {0.3e-3, 2e-3}) {
        for (double phi : {0.0, 0.7, -2.1}) {
            const auto p = lens_transform(g, {rho, phi, -g.f}, LensModel::spherical, Helicity::plus);
            const auto m = lens_transform(g, {rho, -phi, -g.f}, LensModel::spherical, Helicity::minus);
            EXPECT_LT(std::abs(p.f_plus - m.f_minus), 1e-14);
            EXPECT_LT(std::abs(p.f_z - m.f_z), 1e-14);
            EXPECT_LT(std::abs(p.f_minus - m.f_plus), 1e-14);
        }
    }
}

TEST(CartesianConversion, RoundTrip) {
    const PolarizedField f{cplx(0.3, -1.2), cplx(2.0, 0.1), cplx(-0.4, 0.9)};
    const auto back = from_cartesian(to_cartesian(f));
    EXPECT_LT(std::abs(back.f_plus - f.f_plus), 1e-15);
    EXPECT_LT(std::abs(back.f_z - f.f_z), 1e-15);
    EXPECT_LT(std::abs(back.f_minus - f.f_minus), 1e-15);
    const auto c = to_cartesian(f);
    const auto d = cartesian(f);
    EXPECT_LT(std::abs(c.x - d[0]) + std::abs(c.y - d[1]) + std::abs(c.z - d[2]), 1e-15);
    EXPECT_NEAR(std::real(hermitian_product(f, f)), f.intensity(), 1e-14);
}

TEST(CollectionPlane, OnAxisAfterFocus) {
    FocusGeometry g;
    const double e_l = 2.5;
    const auto F = collection_plane_field(g, {0, 0.4, g.f}, e_l);
    EXPECT_LT(std::abs(F.f_plus - e_l * std::polar(1.0, g.k() * g.f - M_PI / 2)), 1e-12);
    EXPECT_EQ(std::abs(F.f_z), 0.0);
    EXPECT_EQ(std::abs(F.f_minus), 0.0);
    EXPECT_THROW(collection_plane_field(g, {0, 0, 0.0}, e_l), std::invalid_argument);
}

TEST(CollectionPlane, MirrorsLensPlaneMagnitude) {
    FocusGeometry g;
    const double e_l = 3.0;
    for (double rho : {0.0, 0.5e-3, 2e-3, 4e-3})
        for (double phi : {0.0, 1.1}) {
            const double a = std::sqrt(collection_plane_field(g, {rho, phi, g.f}, e_l).intensity());
            const double b = std::sqrt(collection_plane_field(g, {rho, phi, -g.f}, e_l).intensity());
            const double ref = e_l * std::sqrt(lens_transform(g, {rho, phi, -g.f}).intensity());
            EXPECT_NEAR(a, ref, 1e-12 * e_l);
            EXPECT_NEAR(b, ref, 1e-12 * e_l);
        }
}

TEST(CollectionPlane, TransverseToRays) {
    FocusGeometry g;
    for (double sign : {1.0, -1.0})
        for (double rho : {0.2e-3, 3e-3, 9e-3})
            for (double phi : {0.0, 0.9, 2.5}) {
                const auto e = cartesian(collection_plane_field(g, {rho, phi, sign * g.f}, 1.0));
                const double R = std::hypot(rho, g.f);
                const std::array<double, 3> dir = {rho * std::cos(phi) / R, rho * std::sin(phi) / R, sign * g.f / R};
                const cplx dot = e[0] * dir[0] + e[1] * dir[1] + e[2] * dir[2];
                EXPECT_LE(std::abs(dot), 1e-12 * norm3(e));
            }
}

// The dipole field carries e^{i(kr+π/2)}, the excitation e^{i(kR−π/2)}: on the
// plane after the focus they are in antiphase.
TEST(CollectionPlane, InterferenceIsDestructiveAfterFocus) {
    FocusGeometry g;
    const double k = g.k();
    for (double rho : {0.0, 0.4e-3, 1.1e-3, 3e-3}) {
        double avg = 0.0;
        const int nphi = 16;
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2 * M_PI * j / nphi;
            const double r = std::hypot(rho, g.f);
            const auto dir = unit_vector(g.f / r, rho / r, phi);
            PolarizedField plus{1.0, 0.0, 0.0};
            const cplx proj = std::conj(dir.f_plus);  // r̂·ε₊ with the conjugate-pairing of the basis
            const PolarizedField transverse = plus - dir * proj;
            const PolarizedField esc = transverse * (1.5 / (k * r) * std::polar(1.0, k * r + M_PI / 2));
            const auto ef = collection_plane_field(g, {rho, phi, g.f}, 1.0);
            avg += std::real(hermitian_product(esc, ef)) / nphi;
        }
        EXPECT_LT(avg, 0.0) << rho;
    }
}
