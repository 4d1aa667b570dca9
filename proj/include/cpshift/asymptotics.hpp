#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cpshift/model.hpp"
#include "cpshift/specfun.hpp"

namespace cpshift {

enum class Orientation { zz, zx };
enum class Retardation { non_retarded, retarded };
enum class Density { sparse, dense };

struct Regime {
    ShiftKind kind = ShiftKind::resonant;
    Orientation orientation = Orientation::zz;
    Retardation retardation = Retardation::non_retarded;
    Density density = Density::sparse;

    friend bool operator==(const Regime&, const Regime&) = default;
};

inline std::string to_string(const Regime& r)
{
    std::string s = r.kind == ShiftKind::resonant ? "res" : "off";
    s += r.orientation == Orientation::zz ? "_zz" : "_zx";
    s += r.retardation == Retardation::non_retarded ? "_nonret" : "_ret";
    s += r.density == Density::sparse ? "_sparse" : "_dense";
    return s;
}

inline std::array<Regime, 8> regimes_for(Orientation o)
{
    std::array<Regime, 8> out{};
    int i = 0;
    for (auto k : {ShiftKind::resonant, ShiftKind::off_resonant})
        for (auto t : {Retardation::non_retarded, Retardation::retarded})
            for (auto d : {Density::sparse, Density::dense}) out[i++] = Regime{k, o, t, d};
    return out;
}

// z and lattice-constant exponents of a law; vanishes marks the identically zero cases.
struct ScalingLaw {
    bool vanishes = false;
    int z_power = 0;
    int a_power = 0;

    friend bool operator==(const ScalingLaw&, const ScalingLaw&) = default;
};

inline ScalingLaw expected_exponent(const Regime& r)
{
    const bool res = r.kind == ShiftKind::resonant;
    const bool ret = r.retardation == Retardation::retarded;
    const bool dense = r.density == Density::dense;
    if (r.orientation == Orientation::zx) {
        if (!dense) return {true, 0, 0};
        if (!ret) return {false, -4, -2};
        return {false, res ? -2 : -5, -2};
    }
    if (!ret) return {false, dense ? -4 : -6, dense ? -2 : 0};
    if (res) return {false, dense ? -3 : -4, dense ? -2 : 0};
    return {false, dense ? -5 : -7, dense ? -2 : 0};
}

// Resonant bulk of an infinite dense lattice, exact in z.
inline double full_closed_form(Orientation o, const ModelParams& p, const LatticeSpec& lat, const Geometry& g)
{
    const double z = g.z_tilde;
    const double a2 = lat.a_tilde * lat.a_tilde;
    const double k = resonant_strength(p);
    const double z2 = z * z;
    const double c2 = std::cos(2.0 * z);
    const double s2 = std::sin(2.0 * z);
    constexpr double pi = std::numbers::pi;
    if (o == Orientation::zz) {
        const double br = -8.0 * cosine_integral(2.0 * z) * z2 * z2 + c2 * (3.0 - 2.0 * z2) + 2.0 * z * (3.0 + 2.0 * z2) * s2;
        return 9.0 * pi * k / (32.0 * a2 * z2 * z2) * br;
    }
    const double br = (3.0 - 4.0 * z2) * c2 + 6.0 * z * s2;
    return 9.0 * pi * k / (64.0 * a2 * z2 * z2) * br;
}

inline double asymptotic_shift(const Regime& r, const ModelParams& p, const LatticeSpec& lat, const Geometry& g)
{
    const ScalingLaw law = expected_exponent(r);
    if (law.vanishes) return 0.0;
    constexpr double pi = std::numbers::pi;
    const double z = g.z_tilde;
    const double a2 = lat.a_tilde * lat.a_tilde;
    const double k = resonant_strength(p);
    const double off_nr = p.rho / (1.0 + p.mu);
    const double off_ret = p.rho / p.mu;
    const bool res = r.kind == ShiftKind::resonant;
    const bool ret = r.retardation == Retardation::retarded;
    const bool dense = r.density == Density::dense;

    if (r.orientation == Orientation::zx) {
        if (!ret) return (res ? 27.0 * pi / 64.0 * k : 27.0 * pi / 128.0 * off_nr) / (a2 * std::pow(z, 4));
        if (res) return -9.0 * pi / 16.0 * k * std::cos(2.0 * z) / (a2 * z * z);
        return 9.0 / 16.0 * off_ret / (a2 * std::pow(z, 5));
    }
    if (!ret) {
        if (res) return dense ? 27.0 * pi / 32.0 * k / (a2 * std::pow(z, 4)) : 4.5 * k / std::pow(z, 6);
        return dense ? 27.0 * pi / 64.0 * off_nr / (a2 * std::pow(z, 4)) : 2.25 * off_nr / std::pow(z, 6);
    }
    if (res) {
        return dense ? 9.0 * pi / 4.0 * k * std::sin(2.0 * z) / (a2 * std::pow(z, 3))
                     : -4.5 * k * std::cos(2.0 * z) / std::pow(z, 4);
    }
    return dense ? 0.9 * off_ret / (a2 * std::pow(z, 5)) : 45.0 / (8.0 * pi) * off_ret / std::pow(z, 7);
}

} // namespace cpshift
