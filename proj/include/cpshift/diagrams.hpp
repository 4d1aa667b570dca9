#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "cpshift/errors.hpp"
#include "cpshift/model.hpp"

namespace cpshift {

enum class ProcessId { I = 1, II, III, IV, V, VI, VII, VIII, IX, X, XI, XII };

inline constexpr std::array<ProcessId, 12> all_processes{ProcessId::I,   ProcessId::II,  ProcessId::III, ProcessId::IV,
                                                         ProcessId::V,   ProcessId::VI,  ProcessId::VII, ProcessId::VIII,
                                                         ProcessId::IX,  ProcessId::X,   ProcessId::XI,  ProcessId::XII};

inline std::string to_string(ProcessId p)
{
    static const std::array<const char*, 12> names{"I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII"};
    return names[static_cast<int>(p) - 1];
}

inline std::optional<ProcessId> process_from_string(const std::string& s)
{
    for (auto p : all_processes)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

// Three linear factors of a denominator, (c0 + cw w + cwp wp), with an overall sign.
struct LinearFactor {
    double constant;
    double w;
    double wp;

    double operator()(double x, double xp) const { return constant + w * x + wp * xp; }
};

struct DenominatorShape {
    double sign;
    std::array<LinearFactor, 3> factors;
};

// Frequencies in units of the test transition; array transition at mu.
inline DenominatorShape denominator_shape(ProcessId p, double mu)
{
    const LinearFactor test_minus_w{1.0, -1.0, 0.0};      // 1 - w
    const LinearFactor test_minus_wp{1.0, 0.0, -1.0};     // 1 - wp
    const LinearFactor array_plus_w{mu, 1.0, 0.0};        // mu + w
    const LinearFactor array_plus_wp{mu, 0.0, 1.0};       // mu + wp
    const LinearFactor detuning{1.0 - mu, 0.0, 0.0};      // 1 - mu
    const LinearFactor both{0.0, 1.0, 1.0};               // w + wp
    const LinearFactor gap{1.0 - mu, -1.0, -1.0};         // 1 - mu - w - wp
    switch (p) {
    case ProcessId::I: return {-1.0, {test_minus_w, detuning, array_plus_wp}};
    case ProcessId::II: return {1.0, {test_minus_w, detuning, test_minus_wp}};
    case ProcessId::III: return {1.0, {test_minus_w, gap, test_minus_wp}};
    case ProcessId::IV: return {1.0, {test_minus_w, both, array_plus_w}};
    case ProcessId::V: return {-1.0, {test_minus_w, gap, array_plus_w}};
    case ProcessId::VI: return {-1.0, {array_plus_w, gap, test_minus_w}};
    case ProcessId::VII: return {1.0, {array_plus_w, gap, array_plus_wp}};
    case ProcessId::VIII: return {1.0, {array_plus_w, detuning, array_plus_wp}};
    case ProcessId::IX: return {-1.0, {array_plus_w, detuning, test_minus_wp}};
    case ProcessId::X: return {1.0, {array_plus_w, both, test_minus_w}};
    case ProcessId::XI: return {1.0, {array_plus_wp, both, test_minus_w}};
    case ProcessId::XII: return {1.0, {array_plus_w, both, test_minus_wp}};
    }
    throw DomainError("unknown process");
}

// Optional override used to exercise the verification path with a broken table.
using DenominatorOverride = std::function<std::optional<double>(ProcessId, double, double, const ModelParams&)>;

inline double denominator(ProcessId p, double w, double wp, const ModelParams& params)
{
    const auto shape = denominator_shape(p, params.mu);
    double d = shape.sign;
    for (const auto& f : shape.factors) d *= f(w, wp);
    return d;
}

namespace detail {

inline double inverse_or_throw(double d)
{
    if (d == 0.0) throw PoleHit("denominator vanishes");
    return 1.0 / d;
}

inline double inverse_sum(double w, double wp, const ModelParams& params, const DenominatorOverride& override_fn)
{
    double s = 0.0;
    for (auto p : all_processes) {
        std::optional<double> d;
        if (override_fn) d = override_fn(p, w, wp, params);
        s += inverse_or_throw(d ? *d : denominator(p, w, wp, params));
    }
    return s;
}

// h(x) = (x - delta) / ((x - 1)(x + mu)) = A/(x - 1) + B/(x + mu).
inline double h_fn(double x, double mu) { return (x - (1.0 - mu)) / ((x - 1.0) * (x + mu)); }

// (h(x) - h(y)) / (x - y) without cancellation; equals h'(x) at x == y.
inline double h_divided_difference(double x, double y, double mu)
{
    const double a = mu / (1.0 + mu);
    const double b = 1.0 / (1.0 + mu);
    return -a / ((x - 1.0) * (y - 1.0)) - b / ((x + mu) * (y + mu));
}

} // namespace detail

inline double symmetrized_inverse_sum(double w, double wp, const ModelParams& params, const DenominatorOverride& override_fn = {})
{
    return 0.5 * (detail::inverse_sum(w, wp, params, override_fn) + detail::inverse_sum(wp, w, params, override_fn));
}

// Symmetrized closed form 4(w - delta)/[delta (w-1)(w+mu)] [1/(w+wp) - 1/(w-wp)].
// The 1/(w - wp) pair is evaluated as a divided difference, finite on the diagonal.
inline double combined_denominator_form(double w, double wp, const ModelParams& params)
{
    const double mu = params.mu;
    const double delta = 1.0 - mu;
    for (double x : {w, wp}) {
        if (x - 1.0 == 0.0 || x + mu == 0.0) throw PoleHit("combined form: on-shell pole");
    }
    if (w + wp == 0.0) throw PoleHit("combined form: w + wp = 0");
    const double plus = (detail::h_fn(w, mu) + detail::h_fn(wp, mu)) / (w + wp);
    return 2.0 / delta * (plus - detail::h_divided_difference(w, wp, mu));
}

// Grouped blocks 1..8 as sums of the table entries.
inline double grouped_inverse(int block, double w, double wp, const ModelParams& params)
{
    auto inv = [&](ProcessId p) { return detail::inverse_or_throw(denominator(p, w, wp, params)); };
    switch (block) {
    case 1: return inv(ProcessId::I) + inv(ProcessId::XI);
    case 2: return inv(ProcessId::II);
    case 3: return inv(ProcessId::III) + inv(ProcessId::V);
    case 4: return inv(ProcessId::IV);
    case 5: return inv(ProcessId::VI) + inv(ProcessId::VII);
    case 6: return inv(ProcessId::VIII);
    case 7: return inv(ProcessId::IX) + inv(ProcessId::XII);
    case 8: return inv(ProcessId::X);
    default: throw DomainError("grouped_inverse: block must be 1..8");
    }
}

struct DiagramCheck {
    double max_relative_deviation = 0.0;
    std::int64_t samples = 0;
    double worst_w = 0.0;
    double worst_wp = 0.0;
    double worst_mu = 0.0;
};

// Distance from every linear factor's zero set (in the w, wp plane).
inline bool near_pole(double w, double wp, double mu, double radius)
{
    for (auto p : all_processes) {
        for (const auto& f : denominator_shape(p, mu).factors) {
            const double g = std::hypot(f.w, f.wp);
            if (g == 0.0) continue;
            if (std::abs(f(w, wp)) / g < radius) return true;
        }
    }
    return false;
}

inline DiagramCheck verify_diagram_identity(std::int64_t samples, std::uint64_t seed, const DenominatorOverride& override_fn = {})
{
    if (samples < 1) throw DomainError("verify_diagram_identity: samples must be >= 1");
    constexpr std::array<double, 3> mus{0.25, 0.5, 0.9};
    constexpr double exclusion = 1e-6;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.0, 2.0);
    DiagramCheck out;
    for (std::int64_t n = 0; n < samples; ++n) {
        const double mu = mus[static_cast<std::size_t>(n % 3)];
        ModelParams prm;
        prm.mu = mu;
        double w, wp;
        do {
            w = freq(rng);
            wp = freq(rng);
        } while (near_pole(w, wp, mu, exclusion));
        const double lhs = symmetrized_inverse_sum(w, wp, prm, override_fn);
        const double rhs = combined_denominator_form(w, wp, prm);
        const double dev = std::abs(lhs - rhs) / std::abs(rhs);
        if (n == 0 || !(dev <= out.max_relative_deviation)) {
            out.max_relative_deviation = std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev;
            out.worst_w = w;
            out.worst_wp = wp;
            out.worst_mu = mu;
        }
        ++out.samples;
    }
    return out;
}

} // namespace cpshift
