#include <gtest/gtest.h>

#include <random>

#include "tightfocus/green_focus.hpp"
#include "tightfocus/mode_propagator.hpp"

using namespace tightfocus;

namespace {

FocusGeometry waist(double w_l, double v = std::numeric_limits<double>::infinity()) {
    FocusGeometry g;
    g.w_l = w_l;
    g.v = v;
    return g;
}

double focus_error(const FocusGeometry& g, int grid = 512) {
    const double modes = std::abs(reconstruct(decompose(g, grid), {0, 0, 0}).f_plus);
    const double closed = std::abs(focal_field(g).ratio);
    return std::abs(modes - closed) / closed;
}

}  // namespace

TEST(Decompose, Preconditions) {
    EXPECT_THROW(decompose(waist(1.1e-3), 63), std::invalid_argument);
    EXPECT_THROW(decompose(waist(-1.0)), std::invalid_argument);
}

TEST(Decompose, SpectrumLayout) {
    const auto s = decompose(waist(1.1e-3), 128);
    ASSERT_EQ(s.nodes.size(), 128u);
    const double k = s.wavenumber();
    for (std::size_t j = 0; j < s.nodes.size(); ++j) {
        EXPECT_GT(s.nodes[j].k_t, 0.0);
        EXPECT_LT(s.nodes[j].k_t, k);
        if (j) EXPECT_GT(s.nodes[j].k_t, s.nodes[j - 1].k_t);
        EXPECT_TRUE(std::isfinite(std::abs(s.kappa_plus[j])) && std::isfinite(std::abs(s.kappa_minus[j])));
    }
}

TEST(Decompose, OnlyUnitAngularMomentum) {
    const auto s = decompose(waist(1.1e-3), 128);
    const double kt = s.nodes[40].k_t;
    for (int m : {-2, -1, 0, 2, 3}) {
        EXPECT_EQ(s.coefficient({kt, +1, m}), cplx(0.0));
        EXPECT_EQ(s.coefficient({kt, -1, m}), cplx(0.0));
    }
    EXPECT_LT(std::abs(s.coefficient({kt, +1, 1}) - s.kappa_plus[40]), 1e-9 * std::abs(s.kappa_plus[40]));
    EXPECT_LT(std::abs(s.coefficient({kt, -1, 1}) - s.kappa_minus[40]), 1e-9 * std::abs(s.kappa_minus[40]) + 1e-300);
}

// Mode-space norm against ∫|F|² dA of the lens-plane field.
TEST(Decompose, Parseval) {
    for (double w : {1.1e-3, 7e-3}) {
        const auto g = waist(w);
        numerics::QuadratureSpec spec;
        spec.relative_tolerance = 1e-10;
        const double real_space =
            numerics::integrate_radial(
                [&](double rho) { return cplx(2 * M_PI * rho * lens_transform(g, {rho, 0, -g.f}).intensity()); }, spec)
                .real();
        EXPECT_NEAR(mode_power(decompose(g)) / real_space, 1.0, 5e-3) << w;
    }
}

TEST(Reconstruct, OnAxisPurelyPlus) {
    FieldEvaluator ev(decompose(waist(4e-3), 256));
    for (double z : {-3e-6, 0.0, 1e-6, 20e-6}) {
        const auto f = ev({0.0, 0.7, z});
        EXPECT_EQ(std::abs(f.f_z), 0.0);
        EXPECT_EQ(std::abs(f.f_minus), 0.0);
        EXPECT_GT(std::abs(f.f_plus), 0.0);
    }
}

TEST(Reconstruct, FocusMatchesClosedForm) {
    for (double u : {0.1, 0.5, 1.0}) EXPECT_LT(focus_error(waist(u * 4.5e-3)), 1e-3) << u;
}

TEST(Reconstruct, FocusBehindHardAperture) {
    const double w = 1.1e-3;
    EXPECT_LT(focus_error(waist(w, 2 * w / 4.5e-3)), 1e-3);
}

class LensPlane : public ::testing::TestWithParam<double> {};

TEST_P(LensPlane, ReproducesLensField) {
    FieldEvaluator ev(decompose(waist(GetParam() * 4.5e-3)));
    EXPECT_LT(lens_plane_fidelity(ev), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(FocusingStrengths, LensPlane, ::testing::Values(0.24, 1.56, 2.22));

TEST(Reconstruct, HelicityMirror) {
    const auto g = waist(1.1e-3);
    FieldEvaluator ev(decompose(g));
    const int n = 64;
    const auto rule = numerics::gauss_legendre(n);
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        const double rho = 1.25 * g.w_l * (1 + rule.nodes[i]);
        for (double phi : {0.3, 2.0}) {
            const CylPoint p{rho, phi, -g.f};
            const auto ref = lens_transform(g, p, LensModel::spherical, Helicity::minus);
            num += rule.weights[i] * rho * (reconstruct_mirrored(ev, p) - ref).intensity();
            den += rule.weights[i] * rho * ref.intensity();
        }
    }
    EXPECT_LT(std::sqrt(num / den), 1e-3);
    // near the focus the mirrored field swaps the circular components
    const auto a = ev({0.4e-6, 0.5, 0.3e-6});
    const auto b = reconstruct_mirrored(ev, {0.4e-6, -0.5, 0.3e-6});
    EXPECT_EQ(a.f_plus, b.f_minus);
    EXPECT_EQ(a.f_minus, b.f_plus);
}

// ∇·E by fourth-order central differences, compared with |∇×E|.
TEST(Reconstruct, DivergenceFree) {
    const auto g = waist(0.5 * 4.5e-3);
    FieldEvaluator ev(decompose(g));
    const double h = g.lambda / 100;
    auto field = [&](double x, double y, double z) {
        return to_cartesian(ev({std::hypot(x, y), std::atan2(y, x), z}));
    };
    auto d = [&](int axis, double x, double y, double z) {
        std::array<CartesianField, 4> s;
        const double off[4] = {-2, -1, 1, 2};
        for (int i = 0; i < 4; ++i) {
            double q[3] = {x, y, z};
            q[axis] += off[i] * h;
            s[i] = field(q[0], q[1], q[2]);
        }
        auto comb = [&](cplx CartesianField::*c) {
            return (s[0].*c - 8.0 * (s[1].*c) + 8.0 * (s[2].*c) - s[3].*c) / (12 * h);
        };
        return std::array<cplx, 3>{comb(&CartesianField::x), comb(&CartesianField::y), comb(&CartesianField::z)};
    };
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dx(-1.5e-6, 1.5e-6), dz(-3e-6, 3e-6);
    for (int i = 0; i < 20; ++i) {
        const double x = dx(rng), y = dx(rng), z = dz(rng);
        const auto gx = d(0, x, y, z), gy = d(1, x, y, z), gz = d(2, x, y, z);
        const cplx div = gx[0] + gy[1] + gz[2];
        const cplx cx = gy[2] - gz[1], cy = gz[0] - gx[2], cz = gx[1] - gy[0];
        const double curl = std::sqrt(std::norm(cx) + std::norm(cy) + std::norm(cz));
        EXPECT_LT(std::abs(div), 1e-4 * curl) << x << " " << y << " " << z;
    }
}

TEST(Reconstruct, GridConvergence) {
    for (double u : {0.5, 2.239}) {
        const auto g = waist(u * 4.5e-3);
        const double a = std::abs(reconstruct(decompose(g, 256), {0, 0, 0}).f_plus);
        const double b = std::abs(reconstruct(decompose(g, 512), {0, 0, 0}).f_plus);
        EXPECT_LT(std::abs(a - b) / b, 5e-4) << u;
    }
}

TEST(AxialProfile, DepthOfField) {
    const auto g = waist(1.1e-3);
    const auto prof = axial_intensity_profile(decompose(g), -15e-6, 15e-6, 301);
    ASSERT_TRUE(prof.fwhm.has_value());
    EXPECT_NEAR(*prof.fwhm, 9.5e-6, 0.2e-6);
    const double paraxial = 2 * g.lambda / (M_PI * g.u() * g.u());
    EXPECT_NEAR(paraxial, 8.31e-6, 0.005e-6);
    EXPECT_GT(*prof.fwhm, paraxial);
}

TEST(AxialProfile, ParabolicLensShiftsAndWeakensFocus) {
    const auto g = waist(1.1e-3);
    DecomposeOptions opt;
    opt.lens = LensModel::parabolic;
    const auto par = axial_intensity_profile(decompose(g, 512, opt), -100e-6, 20e-6, 241);
    const auto sph = axial_intensity_profile(decompose(g), -100e-6, 20e-6, 241);
    auto peak = [](const AxialProfile& p) {
        return *std::max_element(p.samples.begin(), p.samples.end(),
                                 [](auto& a, auto& b) { return a.second < b.second; });
    };
    const auto pp = peak(par), ps = peak(sph);
    EXPECT_NEAR(ps.first, 0.0, 0.5e-6);
    EXPECT_LT(pp.first, -10e-6);  // toward the lens
    EXPECT_LT(pp.second, 0.5 * ps.second);
    ASSERT_TRUE(par.fwhm.has_value());
    EXPECT_GT(*par.fwhm, *sph.fwhm);
}

TEST(AxialProfile, FwhmHelper) {
    std::vector<std::pair<double, double>> tri;
    for (int i = -10; i <= 10; ++i) tri.emplace_back(i, 10.0 - std::abs(i));
    EXPECT_DOUBLE_EQ(full_width_half_maximum(tri), 10.0);
    std::vector<std::pair<double, double>> edge = {{0, 5}, {1, 3}, {2, 1}};
    EXPECT_THROW(full_width_half_maximum(edge), std::domain_error);
    std::vector<std::pair<double, double>> shallow = {{0, 0.9}, {1, 1}, {2, 0.9}};
    EXPECT_THROW(full_width_half_maximum(shallow), std::domain_error);
    FieldEvaluator ev(decompose(waist(1.1e-3), 128));
    const auto side = axial_intensity_profile(ev, 2e-6, 30e-6, 11);
    EXPECT_FALSE(side.fwhm.has_value());
    EXPECT_THROW(axial_intensity_profile(ev, 0, 1e-6, 2), std::invalid_argument);
}

TEST(FocalPlane, WeakFocusingIsParaxial) {
    const auto g = waist(0.022 * 4.5e-3);
    const double wf = g.paraxial_waist();
    const double peak = g.w_l / wf;
    const auto prof = focal_plane_profile(decompose(g), 0.0, 2 * wf, 41);
    EXPECT_EQ(prof.front().abs_z, 0.0);
    EXPECT_EQ(prof.front().abs_minus, 0.0);
    for (const auto& s : prof) {
        EXPECT_NEAR(s.abs_plus, peak * std::exp(-s.rho * s.rho / (wf * wf)), 0.01 * peak) << s.rho;
        EXPECT_LT(s.abs_z, 0.02 * peak);
        EXPECT_LT(s.abs_minus, 1e-3 * peak);
    }
}

TEST(FocalPlane, ModerateFocusing) {
    const auto g = waist(0.3e-3);
    const double wf = g.paraxial_waist();
    EXPECT_NEAR(wf, 3.7e-6, 0.05e-6);
    const auto prof = focal_plane_profile(decompose(g), 0.0, 2 * wf, 201);
    const double peak = prof.front().abs_plus;
    // 1/e² intensity radius from the sampled |F₊|
    double r_e2 = 0;
    for (std::size_t i = 1; i < prof.size(); ++i)
        if (prof[i].abs_plus < peak * std::exp(-1.0)) {
            const auto& a = prof[i - 1];
            const auto& b = prof[i];
            r_e2 = a.rho + (peak * std::exp(-1.0) - a.abs_plus) / (b.abs_plus - a.abs_plus) * (b.rho - a.rho);
            break;
        }
    EXPECT_NEAR(r_e2, wf, 0.03 * wf);
    double zmax = 0;
    for (const auto& s : prof) zmax = std::max(zmax, s.abs_z);
    EXPECT_GT(zmax, 0.02 * peak);  // longitudinal field visible, unlike the paraxial beam
}

TEST(FocalPlane, StrongestFocusNearOptimalWaist) {
    // fixed input power: E_L ∝ 1/w_L
    double best = 0, best_w = 0;
    for (double w : {0.3e-3, 1.1e-3, 4e-3, 7e-3, 10e-3, 13e-3}) {
        const double a = std::abs(reconstruct(decompose(waist(w), 256), {0, 0, 0}).f_plus) / w;
        if (a > best) best = a, best_w = w;
    }
    EXPECT_EQ(best_w, 10e-3);
    EXPECT_THROW(focal_plane_profile(decompose(waist(1e-3), 64), -1.0, 1.0, 5), std::invalid_argument);
}
