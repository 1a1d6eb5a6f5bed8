#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "tightfocus/numerics/errors.hpp"

namespace tightfocus::numerics {

using cplx = std::complex<double>;

struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 0.0;
    long max_subdivisions = 1'000'000;
    double truncation_radius = std::numeric_limits<double>::infinity();  // upper limit
};

/// Describes the phase k·sqrt(ρ² + f²) + k_t·ρ of an oscillatory radial
/// integrand. Initial panels are laid out so each spans a quarter period.
struct OscillationHint {
    double wavenumber = 0.0;             // k
    double focal_length = 0.0;           // f
    double transverse_wavenumber = 0.0;  // k_t, from a Bessel kernel J_m(k_t ρ)
};

struct GaussLegendreRule {
    std::vector<double> nodes;    // ascending, in (-1, 1)
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n).
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one more derivative at the converged node
                p0 = 1.0;
                p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1) p0 = 1.0;
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

/// Barycentric weights for interpolation through Gauss–Legendre nodes:
/// (-1)^j sqrt((1 - x_j²) w_j).
inline std::vector<double> gauss_legendre_barycentric(const GaussLegendreRule& rule) {
    std::vector<double> b(rule.nodes.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double x = rule.nodes[j];
        b[j] = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - x * x) * rule.weights[j]);
    }
    return b;
}

/// Evaluates the barycentric interpolant through (nodes[j], values[j]) at t.
template <class T>
T barycentric_interpolate(const std::vector<double>& nodes, const std::vector<double>& bary,
                          const std::vector<T>& values, double t) {
    T num{};
    double den = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double d = t - nodes[j];
        if (d == 0.0) return values[j];
        const double c = bary[j] / d;
        num += c * values[j];
        den += c;
    }
    return num / den;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule, nodes in [0, 1) of the
// half-interval (symmetric).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_panel(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<cplx, 15> fv;
    fv[7] = f(center);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    cplx kronrod = kKronrodWeights[7] * fv[7];
    cplx gauss = kGaussWeights[3] * fv[7];
    double resabs = kKronrodWeights[7] * std::abs(fv[7]);
    for (std::size_t j = 0; j < 7; ++j) {
        const cplx pair = fv[j] + fv[14 - j];
        kronrod += kKronrodWeights[j] * pair;
        resabs += kKronrodWeights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    const cplx mean = 0.5 * kronrod;
    double resasc = kKronrodWeights[7] * std::abs(fv[7] - mean);
    for (std::size_t j = 0; j < 7; ++j)
        resasc += kKronrodWeights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

    const double scale = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    resasc *= scale;
    resabs *= scale;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, kronrod * half, err};
}

// Boundaries ρ_j where k(sqrt(ρ²+f²) - f) + k_t ρ = jπ/2, up to `limit`.
inline std::vector<double> quarter_period_breaks(const OscillationHint& hint, double limit) {
    const double k = hint.wavenumber;
    const double f = hint.focal_length;
    const double kt = hint.transverse_wavenumber;
    const double step = 0.5 * 3.14159265358979323846;
    auto phase = [&](double r) { return k * (std::hypot(r, f) - f) + kt * r; };
    auto dphase = [&](double r) { return k * r / std::hypot(r, f) + kt; };
    std::vector<double> breaks{0.0};
    const double total = phase(limit);
    const long n = static_cast<long>(std::ceil(total / step));
    if (n > 50'000'000) throw std::invalid_argument("integrate_radial: oscillation hint implies too many panels");
    breaks.reserve(static_cast<std::size_t>(n) + 1);
    double r = 0.0;
    for (long j = 1; j < n; ++j) {
        const double target = j * step;
        if (r == 0.0 && kt == 0.0) {
            // quadratic start: k ρ²/(2f) ≈ target
            r = std::sqrt(2.0 * f * target / k);
        }
        for (int it = 0; it < 60; ++it) {
            const double dr = (phase(r) - target) / dphase(r);
            r -= dr;
            if (std::abs(dr) <= 1e-14 * r) break;
        }
        if (r >= limit) break;
        breaks.push_back(r);
    }
    breaks.push_back(limit);
    return breaks;
}

}  // namespace detail

/// Adaptive Gauss–Kronrod (7/15) integration of f over [0, truncation_radius].
/// An infinite radius is handled with the map ρ = t/(1-t). With an oscillation
/// hint the interval is first cut into quarter-period panels of the phase.
template <class F>
cplx integrate_radial(F&& f, const QuadratureSpec& spec, std::optional<OscillationHint> hint = std::nullopt) {
    if (!(spec.relative_tolerance > 0.0) || spec.relative_tolerance > 1e-3)
        throw std::invalid_argument("integrate_radial: relative_tolerance must be in (0, 1e-3]");
    if (!(spec.absolute_tolerance >= 0.0)) throw std::invalid_argument("integrate_radial: absolute_tolerance < 0");
    if (!(spec.truncation_radius > 0.0)) throw std::invalid_argument("integrate_radial: truncation_radius must be > 0");
    if (spec.max_subdivisions < 1) throw std::invalid_argument("integrate_radial: max_subdivisions must be >= 1");

    const bool infinite = std::isinf(spec.truncation_radius);
    if (infinite && hint) throw std::invalid_argument("integrate_radial: oscillation hint needs a finite radius");

    auto mapped = [&](double t) -> cplx {
        if (!infinite) return f(t);
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const cplx v = f(t / one_minus);
        if (v == 0.0) return v;
        return v / (one_minus * one_minus);
    };
    const double upper = infinite ? 1.0 : spec.truncation_radius;

    std::vector<double> breaks;
    if (hint) {
        breaks = detail::quarter_period_breaks(*hint, upper);
    } else {
        constexpr int initial = 8;
        for (int i = 0; i <= initial; ++i) breaks.push_back(upper * i / initial);
    }

    std::vector<detail::Panel> storage;
    storage.reserve(breaks.size());
    cplx total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        storage.push_back(detail::gauss_kronrod_panel(mapped, breaks[i], breaks[i + 1]));
        total += storage.back().value;
        total_error += storage.back().error;
    }
    std::priority_queue<detail::Panel> heap(std::less<detail::Panel>{}, std::move(storage));

    auto tolerance = [&] { return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total)); };
    long subdivisions = 0;
    while (total_error > tolerance()) {
        if (subdivisions >= spec.max_subdivisions)
            throw ConvergenceError("integrate_radial: no convergence within max_subdivisions", total, total_error);
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw ConvergenceError("integrate_radial: panel width below machine resolution", total, total_error);
        heap.pop();
        const detail::Panel left = detail::gauss_kronrod_panel(mapped, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_panel(mapped, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    return total;
}

/// Integral of f over [a, b] with an n-point Gauss–Legendre rule.
template <class F>
auto gauss_legendre_integrate(F&& f, double a, double b, const GaussLegendreRule& rule) {
    using R = decltype(f(a));
    R sum{};
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

}  // namespace tightfocus::numerics
