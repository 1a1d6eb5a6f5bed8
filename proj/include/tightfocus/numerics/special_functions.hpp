#pragma once

// Incomplete gamma function for real (including negative, non-integer) first
// argument and Bessel functions of the first kind, orders 0..2.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

namespace tightfocus::numerics {

struct GammaArgs {
    double a = 1.0;  // first argument, any real
    double x = 1.0;  // lower limit of the integral, > 0
};

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kAsymptoticThreshold = 40.0;

// e^x Γ(a,x) ~ x^{a-1} Σ (a-1)(a-2)...(a-n) / x^n.  Used for x >= 40 where the
// smallest term of the divergent series is below 1e-16 for |a| <= 1.5.
inline double scaled_gamma_asymptotic(double a, double x) {
    double term = 1.0;
    double sum = 1.0;
    double prev_abs = 1.0;
    for (int n = 1; n < 200; ++n) {
        term *= (a - n) / x;
        const double t_abs = std::abs(term);
        if (t_abs == 0.0) break;
        if (t_abs > prev_abs) break;  // series started diverging
        sum += term;
        if (t_abs < 0.25 * kEps * std::abs(sum)) break;
        prev_abs = t_abs;
    }
    return std::pow(x, a - 1.0) * sum;
}

// Modified Lentz evaluation of the continued fraction
// Γ(a,x) = e^{-x} x^a / (x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a- ...)))
// returning the scaled value x^a · CF.  Converges for x > a - 1 (used for x >= 1).
inline double scaled_gamma_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return std::pow(x, a) * h;
    }
    throw std::runtime_error("incomplete gamma continued fraction failed to converge");
}

// Lower incomplete gamma γ(a,x) for a > 0 by the power series
// γ(a,x) = x^a e^{-x} Σ x^n / (a(a+1)...(a+n)).
inline double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return std::pow(x, a) * std::exp(-x) * sum;
}

// E1(x) = Γ(0,x), x > 0, unscaled (small x only).
inline double exponential_integral_e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= -x / k;
        const double contrib = term / k;
        sum += contrib;
        if (std::abs(contrib) < kEps * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
}

// e^x Γ(a,x) for a in (0, 1] or other a > 0, x > 0, away from the asymptotic range.
inline double scaled_gamma_positive(double a, double x) {
    if (x >= 1.0 && x > a - 1.0) return scaled_gamma_continued_fraction(a, x);
    // Γ(a,x) = Γ(a) - γ(a,x); fine for x < max(1, a-1) at the orders used here.
    return std::exp(x) * (std::tgamma(a) - lower_gamma_series(a, x));
}

inline void check_gamma_domain(double a, double x) {
    if (!(x >= 0.0) || !std::isfinite(a) || std::isnan(x))
        throw std::domain_error("incomplete gamma: x must be >= 0 and a finite (x = " +
                                std::to_string(x) + ")");
    if (x == 0.0 && a <= 0.0)
        throw std::domain_error("incomplete gamma: Γ(a, 0) diverges for a <= 0");
}

}  // namespace detail

/// e^x·Γ(a, x). Never forms e^x on its own, so it stays finite for large x.
inline double scaled_incomplete_gamma(const GammaArgs& args) {
    const double a = args.a;
    const double x = args.x;
    detail::check_gamma_domain(a, x);
    if (x == 0.0) return std::tgamma(a);
    if (x >= detail::kAsymptoticThreshold) {
        if (std::abs(a) <= 1.5) return detail::scaled_gamma_asymptotic(a, x);
        return detail::scaled_gamma_continued_fraction(a, x);
    }
    if (a > 0.0) return detail::scaled_gamma_positive(a, x);

    // a <= 0: start from a + m in (0, 1] (or exactly 0 for integer a) and walk
    // down with S(a) = (S(a+1) - x^a)/a.
    const int m = static_cast<int>(std::ceil(-a));
    double start = a + m;
    double s;
    if (start == 0.0) {
        s = x < 1.0 ? std::exp(x) * detail::exponential_integral_e1_series(x)
                    : detail::scaled_gamma_continued_fraction(0.0, x);
    } else {
        s = detail::scaled_gamma_positive(start, x);
    }
    for (int j = 0; j < m; ++j) {
        start -= 1.0;
        s = (s - std::pow(x, start)) / start;
    }
    return s;
}

/// Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt.
inline double upper_incomplete_gamma(const GammaArgs& args) {
    detail::check_gamma_domain(args.a, args.x);
    if (args.x == 0.0) return std::tgamma(args.a);
    if (args.a > 0.0 && args.x < 1.0 && args.x <= args.a + 1.0)
        return std::tgamma(args.a) - detail::lower_gamma_series(args.a, args.x);
    return std::exp(-args.x) * scaled_incomplete_gamma(args);
}

inline double upper_incomplete_gamma(double a, double x) { return upper_incomplete_gamma({a, x}); }
inline double scaled_incomplete_gamma(double a, double x) { return scaled_incomplete_gamma({a, x}); }

namespace detail {

// Coefficients a_k(m) = Π_{j=1..k} (4m² - (2j-1)²) / (k! 8^k) of Hankel's
// asymptotic expansion.
constexpr std::array<double, 12> hankel_coefficients(int m) {
    std::array<double, 12> c{};
    const double mu = 4.0 * m * m;
    double acc = 1.0;
    for (int k = 0; k < 12; ++k) {
        if (k > 0) acc *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        c[static_cast<std::size_t>(k)] = acc;
    }
    return c;
}

inline constexpr auto kHankel0 = hankel_coefficients(0);
inline constexpr auto kHankel1 = hankel_coefficients(1);
inline constexpr double kHankelThreshold = 30.0;

// J_m(x) = sqrt(2/(πx)) (P cos χ - Q sin χ), χ = x - (2m+1)π/4, x >= 30.
// Given cos/sin of x so callers that already track e^{ix} can skip the trig.
inline double bessel_hankel(const std::array<double, 12>& c, double x, double cos_chi, double sin_chi) {
    const double y = 1.0 / (x * x);
    double p = c[10];
    double q = c[11];
    for (int k = 8; k >= 0; k -= 2) {
        p = c[static_cast<std::size_t>(k)] - p * y;
        q = c[static_cast<std::size_t>(k + 1)] - q * y;
    }
    q /= x;
    return std::sqrt(2.0 / (3.14159265358979323846 * x)) * (p * cos_chi - q * sin_chi);
}

struct BesselTriple {
    double j0, j1, j2;
};

// J0, J1, J2 for x >= 30 from cos x and sin x.
inline BesselTriple bessel_triple_asymptotic(double x, double cos_x, double sin_x) {
    constexpr double r = 0.70710678118654752440;
    // χ0 = x - π/4, χ1 = x - 3π/4
    const double c0 = r * (cos_x + sin_x);
    const double s0 = r * (sin_x - cos_x);
    const double c1 = r * (sin_x - cos_x);
    const double s1 = -r * (cos_x + sin_x);
    const double j0 = bessel_hankel(kHankel0, x, c0, s0);
    const double j1 = bessel_hankel(kHankel1, x, c1, s1);
    return {j0, j1, 2.0 * j1 / x - j0};
}

}  // namespace detail

/// J_order(x) for order 0, 1 or 2 and x >= 0.
inline double bessel_j(int order, double x) {
    if (order < 0 || order > 2)
        throw std::invalid_argument("bessel_j: unsupported order " + std::to_string(order));
    if (!(x >= 0.0)) throw std::domain_error("bessel_j: x must be >= 0");
    return boost::math::cyl_bessel_j(order, x);
}

/// J0, J1 and J2 at the same argument.
inline detail::BesselTriple bessel_j012(double x) {
    if (x >= detail::kHankelThreshold)
        return detail::bessel_triple_asymptotic(x, std::cos(x), std::sin(x));
    const double j0 = boost::math::cyl_bessel_j(0, x);
    const double j1 = boost::math::cyl_bessel_j(1, x);
    const double j2 = x > 0.0 ? 2.0 * j1 / x - j0 : 0.0;
    return {j0, j1, x < 1.0 ? boost::math::cyl_bessel_j(2, x) : j2};
}

}  // namespace tightfocus::numerics
