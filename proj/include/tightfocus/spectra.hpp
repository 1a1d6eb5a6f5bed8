#pragma once

// Lorentzian transmission dips and their least-squares fit.
//   T(δ) = 1 − (1 − T_min)(W/2)² / ((δ − δ₀)² + (W/2)²)
// The baseline is fixed at 1 (transmission normalized to the empty trap).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tightfocus/numerics/errors.hpp"

namespace tightfocus {

struct SpectrumPoint {
    double detuning_mhz = 0.0;
    double transmission = 1.0;
    std::optional<double> sigma;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct LorentzianFit {
    double center = 0.0;  // MHz
    double fwhm = 0.0;    // MHz
    double t_min = 1.0;
    double residual_rms = 0.0;
    Matrix3 covariance{};  // order: center, fwhm, t_min
    bool degenerate = false;
    int iterations = 0;

    double epsilon_max() const { return 1.0 - t_min; }
    double center_sigma() const { return std::sqrt(covariance[0][0]); }
    double fwhm_sigma() const { return std::sqrt(covariance[1][1]); }
    double t_min_sigma() const { return std::sqrt(covariance[2][2]); }
};

struct SpectrumRecord {
    std::vector<SpectrumPoint> points;
    std::optional<LorentzianFit> fit;

    bool has_sigma() const { return !points.empty() && points.front().sigma.has_value(); }

    void validate() const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            if (!std::isfinite(p.detuning_mhz) || !std::isfinite(p.transmission))
                throw std::invalid_argument("spectrum: non-finite value at point " + std::to_string(i));
            if (p.transmission < 0.0 || p.transmission > 1.2)
                throw std::invalid_argument("spectrum: transmission outside [0, 1.2] at point " + std::to_string(i));
            if (i > 0 && !(p.detuning_mhz > points[i - 1].detuning_mhz))
                throw std::invalid_argument("spectrum: detunings must be strictly increasing");
            if (p.sigma.has_value() != points.front().sigma.has_value())
                throw std::invalid_argument("spectrum: sigma given for some points only");
            if (p.sigma && !(*p.sigma > 0.0))
                throw std::invalid_argument("spectrum: sigma must be > 0 at point " + std::to_string(i));
        }
    }
};

class FitError : public numerics::NumericError {
public:
    using numerics::NumericError::NumericError;
};

inline double model_transmission(double center, double fwhm, double t_min, double detuning) {
    if (!(fwhm > 0.0)) throw std::invalid_argument("model_transmission: fwhm must be > 0");
    const double h = 0.5 * fwhm;
    const double d = detuning - center;
    return 1.0 - (1.0 - t_min) * h * h / (d * d + h * h);
}

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-8;  // relative parameter step
    double degenerate_snr = 5.0;   // dip depth over noise below which there is no dip
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Noise level from the scatter of each point about its neighbours' mean.
inline double noise_estimate(const SpectrumRecord& rec) {
    if (rec.has_sigma()) {
        std::vector<double> s;
        for (const auto& p : rec.points) s.push_back(*p.sigma);
        return median(std::move(s));
    }
    std::vector<double> d;
    for (std::size_t i = 1; i + 1 < rec.points.size(); ++i)
        d.push_back(std::abs(rec.points[i].transmission -
                             0.5 * (rec.points[i - 1].transmission + rec.points[i + 1].transmission)));
    return 1.4826 * median(std::move(d)) / std::sqrt(1.5);
}

inline bool solve3(Matrix3 a, std::array<double, 3> b, std::array<double, 3>& x) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
                std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
                piv = r;
        const auto C = static_cast<std::size_t>(c);
        const auto P = static_cast<std::size_t>(piv);
        if (a[P][C] == 0.0) return false;
        std::swap(a[C], a[P]);
        std::swap(b[C], b[P]);
        for (std::size_t r = C + 1; r < 3; ++r) {
            const double m = a[r][C] / a[C][C];
            for (std::size_t k = C; k < 3; ++k) a[r][k] -= m * a[C][k];
            b[r] -= m * b[C];
        }
    }
    for (int r = 2; r >= 0; --r) {
        const auto R = static_cast<std::size_t>(r);
        double s = b[R];
        for (std::size_t k = R + 1; k < 3; ++k) s -= a[R][k] * x[k];
        x[R] = s / a[R][R];
    }
    return true;
}

inline Matrix3 invert3(const Matrix3& a) {
    Matrix3 inv{};
    for (std::size_t c = 0; c < 3; ++c) {
        std::array<double, 3> e{}, x{};
        e[c] = 1.0;
        if (!solve3(a, e, x)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {{{nan, nan, nan}, {nan, nan, nan}, {nan, nan, nan}}};
        }
        for (std::size_t r = 0; r < 3; ++r) inv[r][c] = x[r];
    }
    return inv;
}

}  // namespace detail

/// Weighted least-squares fit of the Lorentzian dip by Levenberg–Marquardt
/// (damped Gauss–Newton with Marquardt's diagonal scaling). Data without a
/// dip come back flagged as degenerate with the FWHM at the data span.
inline LorentzianFit fit_lorentzian(const SpectrumRecord& rec, const FitOptions& opt = {}) {
    rec.validate();
    const auto& pts = rec.points;
    const std::size_t n = pts.size();
    if (n < 5) throw std::invalid_argument("fit_lorentzian: need at least 5 points");
    const double span = pts.back().detuning_mhz - pts.front().detuning_mhz;
    const bool weighted = rec.has_sigma();

    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pts[i].transmission < pts[imin].transmission) imin = i;
    const double depth = 1.0 - pts[imin].transmission;
    const double noise = detail::noise_estimate(rec);

    auto residuals_of = [&](const std::array<double, 3>& p) {
        double rms = 0.0;
        for (const auto& q : pts) {
            const double r = q.transmission - model_transmission(p[0], p[1], p[2], q.detuning_mhz);
            rms += r * r;
        }
        return std::sqrt(rms / static_cast<double>(n));
    };

    auto degenerate_fit = [&](int iterations) {
        double mean = 0.0;
        for (const auto& q : pts) mean += q.transmission;
        mean /= static_cast<double>(n);
        LorentzianFit out;
        out.center = pts[imin].detuning_mhz;
        out.fwhm = span;
        out.t_min = std::clamp(mean, 0.0, 1.0);
        out.residual_rms = residuals_of({out.center, out.fwhm, out.t_min});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.covariance = {{{nan, nan, nan}, {nan, nan, nan}, {nan, nan, nan}}};
        out.degenerate = true;
        out.iterations = iterations;
        return out;
    };

    if (!(depth > std::max(opt.degenerate_snr * noise, 1e-12))) return degenerate_fit(0);

    // initial guess: half-depth crossings on each side of the minimum
    const double half = 1.0 - 0.5 * depth;
    std::optional<double> left, right;
    for (std::size_t i = imin; i > 0; --i) {
        if (pts[i - 1].transmission >= half) {
            const auto& a = pts[i - 1];
            const auto& b = pts[i];
            left = a.detuning_mhz + (half - a.transmission) / (b.transmission - a.transmission) *
                                        (b.detuning_mhz - a.detuning_mhz);
            break;
        }
    }
    for (std::size_t i = imin; i + 1 < n; ++i) {
        if (pts[i + 1].transmission >= half) {
            const auto& a = pts[i];
            const auto& b = pts[i + 1];
            right = a.detuning_mhz + (half - a.transmission) / (b.transmission - a.transmission) *
                                         (b.detuning_mhz - a.detuning_mhz);
            break;
        }
    }
    const double c0 = pts[imin].detuning_mhz;
    double w0 = 0.25 * span;
    if (left && right) w0 = *right - *left;
    else if (left) w0 = 2.0 * (c0 - *left);
    else if (right) w0 = 2.0 * (*right - c0);
    if (!(w0 > 0.0)) w0 = 0.25 * span;

    std::array<double, 3> p = {c0, w0, pts[imin].transmission};

    auto normal_equations = [&](const std::array<double, 3>& q, Matrix3& a, std::array<double, 3>& g) {
        a = {};
        g = {};
        double cost = 0.0;
        const double h = 0.5 * q[1];
        for (const auto& pt : pts) {
            const double d = pt.detuning_mhz - q[0];
            const double den = d * d + h * h;
            const double lor = h * h / den;
            const double model = 1.0 - (1.0 - q[2]) * lor;
            const double inv_s = weighted ? 1.0 / *pt.sigma : 1.0;
            const double r = (pt.transmission - model) * inv_s;
            const std::array<double, 3> j = {-(1.0 - q[2]) * 2.0 * h * h * d / (den * den) * inv_s,
                                             -(1.0 - q[2]) * h * d * d / (den * den) * inv_s, lor * inv_s};
            for (std::size_t r1 = 0; r1 < 3; ++r1) {
                g[r1] += j[r1] * r;
                for (std::size_t c1 = 0; c1 < 3; ++c1) a[r1][c1] += j[r1] * j[c1];
            }
            cost += r * r;
        }
        return cost;
    };

    Matrix3 a{};
    std::array<double, 3> g{};
    double cost = normal_equations(p, a, g);
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iterations && !converged; ++it) {
        Matrix3 damped = a;
        for (std::size_t d = 0; d < 3; ++d) damped[d][d] += lambda * a[d][d];
        std::array<double, 3> step{};
        if (!detail::solve3(damped, g, step)) return degenerate_fit(it);
        std::array<double, 3> trial = {p[0] + step[0], std::abs(p[1] + step[1]), p[2] + step[2]};
        Matrix3 a_trial{};
        std::array<double, 3> g_trial{};
        const double cost_trial = normal_equations(trial, a_trial, g_trial);
        const double scale[3] = {std::max(std::abs(p[0]), p[1]), p[1], std::max(std::abs(p[2]), 1e-2)};
        const bool small = std::abs(step[0]) <= opt.step_tolerance * scale[0] &&
                           std::abs(step[1]) <= opt.step_tolerance * scale[1] &&
                           std::abs(step[2]) <= opt.step_tolerance * scale[2];
        if (cost_trial <= cost) {
            p = trial;
            a = a_trial;
            g = g_trial;
            cost = cost_trial;
            lambda = std::max(lambda * 0.1, 1e-12);
            converged = small;
        } else {
            lambda *= 10.0;
            // no downhill step left at this resolution: at the minimum
            converged = small || lambda > 1e16;
        }
    }
    if (!converged)
        throw FitError("fit_lorentzian: no convergence after " + std::to_string(opt.max_iterations) + " iterations");

    if (!(p[1] <= span) || p[2] < 0.0 || p[2] > 1.0) return degenerate_fit(it);

    LorentzianFit out;
    out.center = p[0];
    out.fwhm = p[1];
    out.t_min = p[2];
    out.residual_rms = residuals_of(p);
    out.iterations = it;
    Matrix3 cov = detail::invert3(a);
    if (!weighted) {
        const double s2 = n > 3 ? cost / static_cast<double>(n - 3) : 0.0;
        for (auto& row : cov)
            for (auto& v : row) v *= s2;
    }
    out.covariance = cov;
    return out;
}

struct LinewidthReport {
    double ratio = 0.0;
    bool consistent = true;  // ratio ≤ threshold: compatible with a clean two-level transition
    double threshold = 1.3;
};

inline LinewidthReport natural_linewidth_check(const LorentzianFit& fit, double gamma_natural_mhz,
                                               double threshold = 1.3) {
    if (!(gamma_natural_mhz > 0.0)) throw std::invalid_argument("natural_linewidth_check: linewidth must be > 0");
    LinewidthReport r;
    r.ratio = fit.fwhm / gamma_natural_mhz;
    r.threshold = threshold;
    r.consistent = r.ratio <= threshold;
    return r;
}

/// Samples the model at the given detunings, adding Gaussian noise of
/// standard deviation noise_sigma (and recording it as the uncertainty).
inline SpectrumRecord synthesize_spectrum(double center, double fwhm, double t_min,
                                          const std::vector<double>& detunings, double noise_sigma = 0.0,
                                          std::uint64_t seed = 0) {
    SpectrumRecord rec;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    for (double d : detunings) {
        SpectrumPoint p;
        p.detuning_mhz = d;
        p.transmission = model_transmission(center, fwhm, t_min, d);
        if (noise_sigma > 0.0) {
            p.transmission += noise(rng);
            p.sigma = noise_sigma;
        }
        rec.points.push_back(p);
    }
    return rec;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("linspace: n must be >= 2");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace tightfocus
