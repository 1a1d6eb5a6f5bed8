#pragma once

// Propagation of the focusing field by expansion in forward-travelling
// cylindrical Maxwell modes (k_t, m = 1, s = ±1).
//
// Coefficients, referenced to the focal plane:
//   κ_s(k_t) = π k_t e^{i k_z f} ∫ρ dρ [ (sk+k_z)/k F₊ J₀(k_tρ) + i√2 (k_t/k) F_z J₁(k_tρ)
//                                        + (sk−k_z)/k F₋ J₂(k_tρ) ]
// with F the lens-plane field at φ = 0. Reconstruction:
//   F₊ = Σ_s ∫dk_t (1/4π)(sk+k_z)/k κ_s J₀ e^{ik_z z}
//   F_z = Σ_s ∫dk_t (−i√2/4π)(k_t/k) κ_s J₁ e^{ik_z z} e^{iφ}
//   F₋ = Σ_s ∫dk_t (1/4π)(sk−k_z)/k κ_s J₂ e^{ik_z z} e^{2iφ}
// The k_t integral is discretized with Gauss–Legendre nodes in the angle
// α = asin(k_t/k) over the support of the spectrum.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tightfocus/constants.hpp"
#include "tightfocus/lens_field.hpp"
#include "tightfocus/numerics/quadrature.hpp"
#include "tightfocus/numerics/special_functions.hpp"

namespace tightfocus {

struct ModeIndex {
    double k_t = 0.0;
    int s = 1;  // helicity ±1
    int m = 1;
};

struct ModeNode {
    double k_t = 0.0;
    double weight = 0.0;  // quadrature weight for dk_t
};

struct ModeSpectrum {
    FocusGeometry geometry;
    LensModel lens = LensModel::spherical;
    double alpha_max = 0.0;             // nodes cover α ∈ (0, alpha_max)
    std::vector<double> unit_nodes;     // Gauss–Legendre nodes on [−1, 1] behind the α grid
    std::vector<double> barycentric;    // interpolation weights for unit_nodes
    std::vector<ModeNode> nodes;
    std::vector<cplx> kappa_plus;
    std::vector<cplx> kappa_minus;

    double wavenumber() const { return geometry.k(); }
    double alpha_of(std::size_t j) const { return 0.5 * alpha_max * (1.0 + unit_nodes[j]); }

    /// κ at an arbitrary mode; zero for m ≠ 1, interpolated between nodes.
    cplx coefficient(const ModeIndex& idx) const {
        if (idx.m != 1) return 0.0;
        if (idx.s != 1 && idx.s != -1) throw std::invalid_argument("ModeSpectrum: helicity must be ±1");
        const double k = wavenumber();
        if (!(idx.k_t > 0.0 && idx.k_t < k)) return 0.0;
        const double alpha = std::asin(idx.k_t / k);
        if (alpha >= alpha_max) return 0.0;
        const double t = 2.0 * alpha / alpha_max - 1.0;
        return numerics::barycentric_interpolate(unit_nodes, barycentric, idx.s == 1 ? kappa_plus : kappa_minus, t);
    }
};

struct DecomposeOptions {
    LensModel lens = LensModel::spherical;
    double periods_per_panel = 5.0;  // radial panel width in periods of the fastest phase
    double truncation_waists = 5.3;  // radial cutoff in units of w_L
};

namespace detail {

inline constexpr int kPanelOrder = 32;

struct RadialSamples {
    double panel_width = 0.0;
    std::size_t panels = 0;
    std::array<double, kPanelOrder> t{};  // node positions within a panel, in (0, 1)
    std::vector<double> rho, inv_rho, inv_sqrt_rho;
    std::vector<double> d0r, d0i, d1r, d1i, d2r, d2i;  // weight·ρ·F components
};

inline RadialSamples build_radial_samples(const FocusGeometry& geom, LensModel lens, double rho_max,
                                          double omega_max, double periods) {
    RadialSamples s;
    const double target = periods * 2.0 * constants::pi / omega_max;
    s.panels = static_cast<std::size_t>(std::ceil(rho_max / target));
    s.panel_width = rho_max / static_cast<double>(s.panels);
    const auto rule = numerics::gauss_legendre(kPanelOrder);
    std::array<double, kPanelOrder> w{};
    for (int i = 0; i < kPanelOrder; ++i) {
        s.t[static_cast<std::size_t>(i)] = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(i)]);
        w[static_cast<std::size_t>(i)] = 0.5 * rule.weights[static_cast<std::size_t>(i)] * s.panel_width;
    }
    const std::size_t n = s.panels * kPanelOrder;
    for (auto* v : {&s.rho, &s.inv_rho, &s.inv_sqrt_rho, &s.d0r, &s.d0i, &s.d1r, &s.d1i, &s.d2r, &s.d2i})
        v->resize(n);
    for (std::size_t p = 0; p < s.panels; ++p) {
        for (std::size_t i = 0; i < kPanelOrder; ++i) {
            const std::size_t idx = p * kPanelOrder + i;
            const double rho = (static_cast<double>(p) + s.t[i]) * s.panel_width;
            const PolarizedField fld = lens_transform(geom, {rho, 0.0, -geom.f}, lens);
            const double wr = w[i] * rho;
            s.rho[idx] = rho;
            s.inv_rho[idx] = 1.0 / rho;
            s.inv_sqrt_rho[idx] = 1.0 / std::sqrt(rho);
            s.d0r[idx] = wr * fld.f_plus.real();
            s.d0i[idx] = wr * fld.f_plus.imag();
            s.d1r[idx] = wr * fld.f_z.real();
            s.d1i[idx] = wr * fld.f_z.imag();
            s.d2r[idx] = wr * fld.f_minus.real();
            s.d2i[idx] = wr * fld.f_minus.imag();
        }
    }
    return s;
}

// ∫ρ F_m J_m(k_t ρ) dρ for m = 0, 1, 2 against the sampled lens field.
inline std::array<cplx, 3> project_node(const RadialSamples& s, double kt) {
    constexpr std::size_t n = kPanelOrder;
    const double h = s.panel_width;
    std::array<double, 6> slow{};
    const double first_fast = std::ceil(numerics::detail::kHankelThreshold / (kt * h));
    const std::size_t p0 = std::min(s.panels, static_cast<std::size_t>(first_fast));
    for (std::size_t idx = 0; idx < p0 * n; ++idx) {
        const auto b = numerics::bessel_j012(kt * s.rho[idx]);
        slow[0] += s.d0r[idx] * b.j0;
        slow[1] += s.d0i[idx] * b.j0;
        slow[2] += s.d1r[idx] * b.j1;
        slow[3] += s.d1i[idx] * b.j1;
        slow[4] += s.d2r[idx] * b.j2;
        slow[5] += s.d2i[idx] * b.j2;
    }

    // Large-argument part: Hankel expansion with e^{ik_tρ} advanced panel to
    // panel by a fixed rotation (re-seeded every 256 panels).
    alignas(64) double er[n], ei[n];
    for (std::size_t i = 0; i < n; ++i) {
        er[i] = std::cos(kt * h * s.t[i]);
        ei[i] = std::sin(kt * h * s.t[i]);
    }
    alignas(64) double a0r[n] = {}, a0i[n] = {}, a1r[n] = {}, a1i[n] = {}, a2r[n] = {}, a2i[n] = {};
    const double rot_r = std::cos(kt * h), rot_i = std::sin(kt * h);
    const double inv_kt = 1.0 / kt;
    const double amp_scale = std::sqrt(2.0 / (constants::pi * kt));
    constexpr double r2 = 0.70710678118654752440;
    const auto& c0 = numerics::detail::kHankel0;
    const auto& c1 = numerics::detail::kHankel1;
    double br = 1.0, bi = 0.0;
    for (std::size_t p = p0; p < s.panels; ++p) {
        if ((p - p0) % 256 == 0) {
            const double ph = kt * h * static_cast<double>(p);
            br = std::cos(ph);
            bi = std::sin(ph);
        }
        const std::size_t base = p * n;
        const double* ir = s.inv_rho.data() + base;
        const double* isr = s.inv_sqrt_rho.data() + base;
        const double* x0r = s.d0r.data() + base;
        const double* x0i = s.d0i.data() + base;
        const double* x1r = s.d1r.data() + base;
        const double* x1i = s.d1i.data() + base;
        const double* x2r = s.d2r.data() + base;
        const double* x2i = s.d2i.data() + base;
        for (std::size_t i = 0; i < n; ++i) {
            const double cx = br * er[i] - bi * ei[i];
            const double sx = br * ei[i] + bi * er[i];
            const double ix = ir[i] * inv_kt;
            const double y = ix * ix;
            const double p0c = c0[0] - y * (c0[2] - y * (c0[4] - y * (c0[6] - y * (c0[8] - y * c0[10]))));
            const double q0c = ix * (c0[1] - y * (c0[3] - y * (c0[5] - y * (c0[7] - y * (c0[9] - y * c0[11])))));
            const double p1c = c1[0] - y * (c1[2] - y * (c1[4] - y * (c1[6] - y * (c1[8] - y * c1[10]))));
            const double q1c = ix * (c1[1] - y * (c1[3] - y * (c1[5] - y * (c1[7] - y * (c1[9] - y * c1[11])))));
            const double amp = amp_scale * isr[i];
            const double cps = r2 * (cx + sx);
            const double smc = r2 * (sx - cx);
            const double j0 = amp * (p0c * cps - q0c * smc);
            const double j1 = amp * (p1c * smc + q1c * cps);
            const double j2 = 2.0 * j1 * ix - j0;
            a0r[i] += x0r[i] * j0;
            a0i[i] += x0i[i] * j0;
            a1r[i] += x1r[i] * j1;
            a1i[i] += x1i[i] * j1;
            a2r[i] += x2r[i] * j2;
            a2i[i] += x2i[i] * j2;
        }
        const double nbr = br * rot_r - bi * rot_i;
        bi = br * rot_i + bi * rot_r;
        br = nbr;
    }
    for (std::size_t i = 0; i < n; ++i) {
        slow[0] += a0r[i];
        slow[1] += a0i[i];
        slow[2] += a1r[i];
        slow[3] += a1i[i];
        slow[4] += a2r[i];
        slow[5] += a2i[i];
    }
    return {cplx(slow[0], slow[1]), cplx(slow[2], slow[3]), cplx(slow[4], slow[5])};
}

inline double radial_cutoff(const FocusGeometry& geom, const DecomposeOptions& opt) {
    double rho_max = opt.truncation_waists * geom.w_l;
    if (geom.finite_aperture()) rho_max = std::min(rho_max, geom.aperture_radius());
    return rho_max;
}

// Upper end of the angular spectrum. A hard aperture edge inside the
// Gaussian diffracts into all angles, so the full range is kept then.
inline double spectral_support(const FocusGeometry& geom, const DecomposeOptions& opt) {
    const double rho_max = radial_cutoff(geom, opt);
    const double edge = rho_max / geom.w_l;
    if (geom.finite_aperture() && std::exp(-edge * edge) > 1e-12) return 0.5 * constants::pi;
    if (opt.lens == LensModel::parabolic) return std::asin(std::min(1.0, rho_max / geom.f));
    return std::atan(rho_max / geom.f);
}

}  // namespace detail

/// Expands the lens-plane field in m = 1 cylindrical modes on grid_size
/// Gauss–Legendre nodes.
inline ModeSpectrum decompose(const FocusGeometry& geom, int grid_size = 512, const DecomposeOptions& opt = {}) {
    geom.validate();
    if (grid_size < 64) throw std::invalid_argument("decompose: grid_size must be >= 64");
    if (!(opt.periods_per_panel > 0.0) || !(opt.truncation_waists > 0.0))
        throw std::invalid_argument("decompose: invalid options");

    const double k = geom.k();
    const double f = geom.f;
    const double rho_max = detail::radial_cutoff(geom, opt);

    ModeSpectrum out;
    out.geometry = geom;
    out.lens = opt.lens;
    out.alpha_max = detail::spectral_support(geom, opt);

    const auto rule = numerics::gauss_legendre(grid_size);
    out.unit_nodes = rule.nodes;
    out.barycentric = numerics::gauss_legendre_barycentric(rule);

    const double lens_rate = opt.lens == LensModel::parabolic ? k * rho_max / f : k * rho_max / std::hypot(rho_max, f);
    const double omega_max = k * std::sin(out.alpha_max) + lens_rate;
    const auto samples = detail::build_radial_samples(geom, opt.lens, rho_max, omega_max, opt.periods_per_panel);

    const std::size_t n = rule.nodes.size();
    out.nodes.resize(n);
    out.kappa_plus.resize(n);
    out.kappa_minus.resize(n);
    const cplx i(0.0, 1.0);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double alpha = out.alpha_of(j);
        const double kt = k * std::sin(alpha);
        const double kz = k * std::cos(alpha);
        out.nodes[j] = {kt, 0.5 * out.alpha_max * rule.weights[j] * kz};
        const auto proj = detail::project_node(samples, kt);
        for (const auto& v : proj) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numerics::NumericError("decompose: non-finite projection at k_t = " + std::to_string(kt));
        }
        const cplx pref = constants::pi * kt * std::polar(1.0, kz * f);
        const cplx common = i * sqrt2 * (kt / k) * proj[1];
        out.kappa_plus[j] = pref * ((k + kz) / k * proj[0] + common + (k - kz) / k * proj[2]);
        out.kappa_minus[j] = pref * ((-k + kz) / k * proj[0] + common + (-k - kz) / k * proj[2]);
    }
    return out;
}

/// Σ_s ∫ dk_t |κ_s|²/(2π k_t), equal to ∫|F|² dA over any plane z.
inline double mode_power(const ModeSpectrum& s) {
    double total = 0.0;
    for (std::size_t j = 0; j < s.nodes.size(); ++j)
        total += s.nodes[j].weight * (std::norm(s.kappa_plus[j]) + std::norm(s.kappa_minus[j])) /
                 (2.0 * constants::pi * s.nodes[j].k_t);
    return total;
}

/// Evaluates the mode sum at many points. Far from the focus the e^{ik_z z}
/// and Bessel factors oscillate faster than the stored nodes can resolve;
/// there κ is interpolated onto a finer composite Gauss–Legendre grid, built
/// once per resolution and cached. Not safe for concurrent use of one object.
class FieldEvaluator {
public:
    explicit FieldEvaluator(ModeSpectrum spectrum) : s_(std::move(spectrum)) {
        std::vector<double> alpha(s_.nodes.size()), weight(s_.nodes.size());
        for (std::size_t j = 0; j < alpha.size(); ++j) {
            alpha[j] = s_.alpha_of(j);
            weight[j] = s_.nodes[j].weight;
        }
        direct_ = build(alpha, weight, s_.kappa_plus, s_.kappa_minus);
    }

    const ModeSpectrum& spectrum() const { return s_; }

    PolarizedField operator()(const CylPoint& p) { return evaluate(p); }

    PolarizedField evaluate(const CylPoint& p) {
        if (!(p.rho >= 0.0)) throw std::invalid_argument("reconstruct: rho must be >= 0");
        const int panels = panels_needed(std::abs(p.z), p.rho);
        if (panels == 0) return sum(direct_, p);
        return sum(dense(panels), p);
    }

    /// Phase range of the mode integrand at (|z|, ρ); decides the grid.
    double phase_span(double abs_z, double rho) const {
        const double k = s_.wavenumber();
        return k * (abs_z * (1.0 - std::cos(s_.alpha_max)) + rho * std::sin(s_.alpha_max));
    }

    /// 0 when the stored nodes suffice, otherwise the number of 32-point panels.
    int panels_needed(double abs_z, double rho) const {
        const double phi = phase_span(abs_z, rho);
        if (phi <= 0.75 * static_cast<double>(s_.nodes.size())) return 0;
        int panels = 1;
        while (panels * 20.0 < phi) panels *= 2;
        return panels;
    }

private:
    struct Kernel {
        std::vector<double> kt, kz;
        std::vector<cplx> cp, cz, cm;
    };

    Kernel build(const std::vector<double>& alpha, const std::vector<double>& weight, const std::vector<cplx>& kp,
                 const std::vector<cplx>& km) const {
        const double k = s_.wavenumber();
        const double q = 1.0 / (4.0 * constants::pi);
        const cplx z_pref(0.0, -std::sqrt(2.0) * q);
        Kernel K;
        const std::size_t n = alpha.size();
        K.kt.resize(n);
        K.kz.resize(n);
        K.cp.resize(n);
        K.cz.resize(n);
        K.cm.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double kt = k * std::sin(alpha[j]);
            const double kz = k * std::cos(alpha[j]);
            K.kt[j] = kt;
            K.kz[j] = kz;
            K.cp[j] = weight[j] * q * ((k + kz) * kp[j] + (kz - k) * km[j]) / k;
            K.cz[j] = weight[j] * z_pref * (kt / k) * (kp[j] + km[j]);
            K.cm[j] = weight[j] * q * ((k - kz) * kp[j] - (k + kz) * km[j]) / k;
        }
        return K;
    }

    const Kernel& dense(int panels) {
        auto it = dense_.find(panels);
        if (it != dense_.end()) return it->second;
        const auto rule = numerics::gauss_legendre(detail::kPanelOrder);
        const double k = s_.wavenumber();
        const double width = s_.alpha_max / panels;
        const std::size_t n = static_cast<std::size_t>(panels) * rule.nodes.size();
        std::vector<double> alpha(n), weight(n);
        std::vector<cplx> kp(n), km(n);
        for (int p = 0; p < panels; ++p) {
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const std::size_t idx = static_cast<std::size_t>(p) * rule.nodes.size() + i;
                const double a = width * (p + 0.5 * (1.0 + rule.nodes[i]));
                alpha[idx] = a;
                weight[idx] = 0.5 * width * rule.weights[i] * k * std::cos(a);
                const double t = 2.0 * a / s_.alpha_max - 1.0;
                kp[idx] = numerics::barycentric_interpolate(s_.unit_nodes, s_.barycentric, s_.kappa_plus, t);
                km[idx] = numerics::barycentric_interpolate(s_.unit_nodes, s_.barycentric, s_.kappa_minus, t);
            }
        }
        return dense_.emplace(panels, build(alpha, weight, kp, km)).first->second;
    }

    static PolarizedField sum(const Kernel& K, const CylPoint& p) {
        cplx fp = 0.0, fz = 0.0, fm = 0.0;
        for (std::size_t j = 0; j < K.kt.size(); ++j) {
            const auto b = numerics::bessel_j012(K.kt[j] * p.rho);
            const cplx e = std::polar(1.0, K.kz[j] * p.z);
            fp += K.cp[j] * (b.j0 * e);
            fz += K.cz[j] * (b.j1 * e);
            fm += K.cm[j] * (b.j2 * e);
        }
        if (p.rho == 0.0) return {fp, 0.0, 0.0};
        return {fp, fz * std::polar(1.0, p.phi), fm * std::polar(1.0, 2.0 * p.phi)};
    }

    ModeSpectrum s_;
    Kernel direct_;
    std::map<int, Kernel> dense_;
};

/// Field at one point behind the lens (z ≥ −f).
inline PolarizedField reconstruct(const ModeSpectrum& spectrum, const CylPoint& p) {
    FieldEvaluator ev(spectrum);
    return ev(p);
}

/// Field for an ε₋ input obtained from the ε₊ spectrum by the mirror y → −y,
/// which swaps the circular components and reverses φ.
inline PolarizedField reconstruct_mirrored(FieldEvaluator& ev, const CylPoint& p) {
    const PolarizedField f = ev({p.rho, -p.phi, p.z});
    return {f.f_minus, f.f_z, f.f_plus};
}

struct AxialProfile {
    std::vector<std::pair<double, double>> samples;  // (z, |F₊|²)
    std::optional<double> fwhm;                      // absent if the peak is not interior
};

/// Full width at half maximum of sampled data, by linear interpolation
/// between the samples bracketing the half level on each side of the peak.
inline double full_width_half_maximum(const std::vector<std::pair<double, double>>& s) {
    if (s.size() < 3) throw std::invalid_argument("full_width_half_maximum: need at least 3 samples");
    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].second > s[peak].second) peak = i;
    if (peak == 0 || peak + 1 == s.size()) throw std::domain_error("FWHM undefined: peak not interior to range");
    const double half = 0.5 * s[peak].second;
    std::size_t l = peak;
    while (l > 0 && s[l].second >= half) --l;
    std::size_t r = peak;
    while (r + 1 < s.size() && s[r].second >= half) ++r;
    if (s[l].second >= half || s[r].second >= half)
        throw std::domain_error("FWHM undefined: half maximum not reached inside range");
    auto cross = [&](std::size_t a, std::size_t b) {
        const double t = (half - s[a].second) / (s[b].second - s[a].second);
        return s[a].first + t * (s[b].first - s[a].first);
    };
    return cross(r - 1, r) - cross(l, l + 1);
}

inline AxialProfile axial_intensity_profile(FieldEvaluator& ev, double z_lo, double z_hi, int samples) {
    if (samples < 3) throw std::invalid_argument("axial_intensity_profile: samples must be >= 3");
    if (!(z_hi > z_lo)) throw std::invalid_argument("axial_intensity_profile: empty z range");
    AxialProfile out;
    out.samples.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double z = z_lo + (z_hi - z_lo) * i / (samples - 1);
        out.samples.emplace_back(z, std::norm(ev({0.0, 0.0, z}).f_plus));
    }
    try {
        out.fwhm = full_width_half_maximum(out.samples);
    } catch (const std::domain_error&) {
        out.fwhm.reset();
    }
    return out;
}

inline AxialProfile axial_intensity_profile(const ModeSpectrum& s, double z_lo, double z_hi, int samples) {
    FieldEvaluator ev(s);
    return axial_intensity_profile(ev, z_lo, z_hi, samples);
}

struct FocalPlaneSample {
    double rho = 0.0;
    double abs_plus = 0.0, abs_z = 0.0, abs_minus = 0.0;
};

inline std::vector<FocalPlaneSample> focal_plane_profile(FieldEvaluator& ev, double rho_lo, double rho_hi,
                                                         int samples) {
    if (samples < 3) throw std::invalid_argument("focal_plane_profile: samples must be >= 3");
    if (!(rho_lo >= 0.0) || !(rho_hi > rho_lo)) throw std::invalid_argument("focal_plane_profile: bad rho range");
    std::vector<FocalPlaneSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double rho = rho_lo + (rho_hi - rho_lo) * i / (samples - 1);
        const PolarizedField f = ev({rho, 0.0, 0.0});
        out.push_back({rho, std::abs(f.f_plus), std::abs(f.f_z), std::abs(f.f_minus)});
    }
    return out;
}

inline std::vector<FocalPlaneSample> focal_plane_profile(const ModeSpectrum& s, double rho_lo, double rho_hi,
                                                         int samples) {
    FieldEvaluator ev(s);
    return focal_plane_profile(ev, rho_lo, rho_hi, samples);
}

/// RMS relative difference between the reconstructed field on the lens plane
/// and the field the spectrum was built from, over ρ ≤ radius_waists·w_L.
inline double lens_plane_fidelity(FieldEvaluator& ev, int samples = 96, double radius_waists = 2.5) {
    const ModeSpectrum& s = ev.spectrum();
    const FocusGeometry& g = s.geometry;
    const auto rule = numerics::gauss_legendre(samples);
    const double r_max = radius_waists * g.w_l;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double rho = 0.5 * r_max * (1.0 + rule.nodes[i]);
        const double w = rule.weights[i] * rho;
        const CylPoint p{rho, 0.0, -g.f};
        const PolarizedField ref = lens_transform(g, p, s.lens);
        const PolarizedField rec = ev(p);
        num += w * (rec - ref).intensity();
        den += w * ref.intensity();
    }
    return std::sqrt(num / den);
}

}  // namespace tightfocus
