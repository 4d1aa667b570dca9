#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cpshift/errors.hpp"

namespace cpshift {

namespace detail {

inline constexpr double ci_switch = 2.0;
inline constexpr double e1_switch = 1.0;

// gamma + ln x + sum_{k>=1} (-1)^k x^{2k} / (2k (2k)!)
inline double ci_series(double x)
{
    const double x2 = x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= -x2 / ((2.0 * k - 1.0) * (2.0 * k));
        const double add = term / (2.0 * k);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return std::numbers::egamma + std::log(x) + sum;
}

// Modified Lentz evaluation of E1(ix); Ci(x) = -Re E1(ix).
inline double ci_continued_fraction(double x)
{
    using cd = std::complex<double>;
    constexpr double tiny = 1e-300;
    cd b{1.0, x};
    cd c{1.0 / tiny, 0.0};
    cd d = 1.0 / b;
    cd h = d;
    for (int i = 2; i < 10000; ++i) {
        const double a = -static_cast<double>((i - 1) * (i - 1));
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const cd del = c * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
    }
    h *= cd{std::cos(x), -std::sin(x)};
    return -h.real();
}

inline double e1_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
}

// e^x E1(x) for x > 0 by continued fraction; accurate for x >= 1.
inline double scaled_e1_continued_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

} // namespace detail

// Ci(x) = gamma + ln x + int_0^x (cos t - 1)/t dt
inline double cosine_integral(double x)
{
    if (!(x > 0.0)) throw DomainError("cosine_integral: x must be positive");
    if (std::isinf(x)) return 0.0;
    return x <= detail::ci_switch ? detail::ci_series(x) : detail::ci_continued_fraction(x);
}

// E1(x) = int_x^inf e^{-t}/t dt
inline double exponential_integral_e1(double x)
{
    if (!(x > 0.0)) throw DomainError("exponential_integral_e1: x must be positive");
    if (x <= detail::e1_switch) return detail::e1_series(x);
    if (x > 745.0) return 0.0;
    return std::exp(-x) * detail::scaled_e1_continued_fraction(x);
}

// e^x E1(x), finite for large x.
inline double scaled_e1(double x)
{
    if (!(x > 0.0)) throw DomainError("scaled_e1: x must be positive");
    if (x <= detail::e1_switch) return std::exp(x) * detail::e1_series(x);
    return detail::scaled_e1_continued_fraction(x);
}

// Chi(x) - Shi(x) = -E1(x)
inline double chi_minus_shi(double x)
{
    if (!(x > 0.0)) throw DomainError("chi_minus_shi: x must be positive");
    return -exponential_integral_e1(x);
}

} // namespace cpshift
