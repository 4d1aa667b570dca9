#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "cpshift/errors.hpp"

namespace cpshift {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace quad {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<double, N>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double plus(double a, double b) { return a + b; }
inline std::complex<double> plus(std::complex<double> a, std::complex<double> b) { return a + b; }
template <std::size_t N>
std::array<double, N> plus(std::array<double, N> a, const std::array<double, N>& b)
{
    for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

inline double times(double s, double a) { return s * a; }
inline std::complex<double> times(double s, std::complex<double> a) { return s * a; }
template <std::size_t N>
std::array<double, N> times(double s, std::array<double, N> a)
{
    for (double& x : a) x *= s;
    return a;
}

inline constexpr std::array<double, 8> kronrod_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Panel {
    double a;
    double b;
    V value;
    double error;
};

template <class V, class F>
Panel<V> gauss_kronrod(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<V, 15> fv;
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    V kron = times(kronrod_weights[7], fv[7]);
    V gauss = times(gauss_weights[3], fv[7]);
    for (int j = 0; j < 7; ++j) {
        kron = plus(kron, times(kronrod_weights[j], plus(fv[j], fv[14 - j])));
        if (j % 2 == 1) gauss = plus(gauss, times(gauss_weights[j / 2], plus(fv[j], fv[14 - j])));
    }
    const V mean = times(0.5, kron);
    double asc = kronrod_weights[7] * magnitude(plus(fv[7], times(-1.0, mean)));
    for (int j = 0; j < 7; ++j)
        asc += kronrod_weights[j] * (magnitude(plus(fv[j], times(-1.0, mean))) + magnitude(plus(fv[14 - j], times(-1.0, mean))));
    asc *= std::abs(half);
    const V value = times(half, kron);
    double err = magnitude(plus(value, times(-half, gauss)));
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    if (!std::isfinite(magnitude(value))) err = std::numeric_limits<double>::infinity();
    return {a, b, value, err};
}

} // namespace quad

// Globally adaptive G7K15 over consecutive breakpoints.
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const QuadOptions& opt = {})
{
    using V = std::decay_t<decltype(f(0.0))>;
    using P = quad::Panel<V>;
    if (breaks.size() < 2) throw DomainError("integrate: need at least two breakpoints");
    auto worse = [](const P& x, const P& y) { return x.error < y.error; };
    std::priority_queue<P, std::vector<P>, decltype(worse)> heap(worse);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] != breaks[i]) heap.push(quad::gauss_kronrod<V>(f, breaks[i], breaks[i + 1]));
    }
    QuadResult<V> out;
    if (heap.empty()) return out;
    int evals = 15 * static_cast<int>(heap.size());
    auto totals = [&heap]() {
        auto copy = heap;
        V value{};
        double err = 0.0;
        std::vector<P> panels;
        while (!copy.empty()) {
            panels.push_back(copy.top());
            copy.pop();
        }
        std::sort(panels.begin(), panels.end(), [](const P& x, const P& y) { return x.a < y.a; });
        for (const auto& p : panels) {
            value = quad::plus(value, p.value);
            err += p.error;
        }
        return std::pair{value, err};
    };
    V value{};
    double err = 0.0;
    double running_err = 0.0;
    {
        auto [v, e] = totals();
        value = v;
        err = e;
        running_err = e;
    }
    V running_value = value;
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * quad::magnitude(running_value));
        if (running_err <= target) break;
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            auto [v, e] = totals();
            if (e <= std::max(opt.abs_tol, opt.rel_tol * quad::magnitude(v))) {
                running_value = v;
                running_err = e;
                break;
            }
            throw QuadratureFailure("integrate: interval limit reached, error estimate " + std::to_string(e));
        }
        const P worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b)))
            throw QuadratureFailure("integrate: interval collapsed below machine resolution");
        const P left = quad::gauss_kronrod<V>(f, worst.a, mid);
        const P right = quad::gauss_kronrod<V>(f, mid, worst.b);
        evals += 30;
        heap.push(left);
        heap.push(right);
        running_value = quad::plus(running_value, quad::plus(quad::plus(left.value, right.value), quad::times(-1.0, worst.value)));
        running_err += left.error + right.error - worst.error;
        if (!std::isfinite(running_err)) {
            auto [v, e] = totals();
            running_value = v;
            running_err = e;
        }
    }
    // Re-sum in positional order so the result does not depend on heap history.
    auto [v, e] = totals();
    out.value = v;
    out.error = e;
    out.evaluations = evals;
    return out;
}

template <class F>
auto integrate(F&& f, std::initializer_list<double> breaks, const QuadOptions& opt = {})
{
    return integrate(std::forward<F>(f), std::span<const double>(breaks.begin(), breaks.size()), opt);
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {})
{
    const std::array<double, 2> br{a, b};
    return integrate(std::forward<F>(f), std::span<const double>(br), opt);
}

// int_b^inf f(x) dx with x = b / t, b > 0.
template <class F>
auto integrate_tail(F&& f, double b, const QuadOptions& opt = {})
{
    if (!(b > 0.0)) throw DomainError("integrate_tail: lower limit must be positive");
    auto mapped = [&f, b](double t) {
        const double x = b / t;
        return quad::times(b / (t * t), f(x));
    };
    return integrate(mapped, 0.0, 1.0, opt);
}

// int_{breaks[0]}^inf f(x) dx. The finite breakpoints are kept as panel
// edges and the tail beyond the last one is mapped with x = b / t.
template <class F>
auto integrate_to_infinity(F&& f, std::vector<double> breaks, const QuadOptions& opt = {})
{
    if (breaks.empty() || !(breaks.back() > 0.0)) throw DomainError("integrate_to_infinity: last breakpoint must be positive");
    const double b = breaks.back();
    auto mapped = [&f, b](double s) {
        if (s <= b) return f(s);
        const double t = 1.0 - (s - b);
        return quad::times(b / (t * t), f(b / t));
    };
    breaks.push_back(b + 1.0);
    return integrate(mapped, std::span<const double>(breaks), opt);
}

} // namespace cpshift
