#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "cpshift/errors.hpp"

namespace cpshift {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }

inline constexpr Vec3 unit_x{1.0, 0.0, 0.0};
inline constexpr Vec3 unit_y{0.0, 1.0, 0.0};
inline constexpr Vec3 unit_z{0.0, 0.0, 1.0};

// Frequencies in units of the test-atom transition, shifts in units of its
// free-space linewidth, lengths multiplied by the resonant wavenumber.
struct ModelParams {
    double mu = 0.5;     // array transition / test transition
    double rho = 1e-6;   // test linewidth / test transition
    Vec3 test_dipole = unit_z;
    Vec3 array_dipole = unit_z;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct LatticeSpec {
    double a_tilde = 0.01;
    std::int64_t half_extent = 0;   // sites n_x, n_y in [-M, M]

    std::int64_t side() const { return 2 * half_extent + 1; }
    double atom_count() const { return static_cast<double>(side()) * static_cast<double>(side()); }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

// Half-extent whose (2M+1)^2 lattice best matches N atoms.
inline std::int64_t half_extent_for_atoms(double atoms)
{
    if (!(atoms >= 1.0)) throw NonPositiveLength("atom count must be at least 1");
    const auto lo = static_cast<std::int64_t>(std::floor((std::sqrt(atoms) - 1.0) / 2.0));
    const auto count = [](std::int64_t m) { return static_cast<double>(2 * m + 1) * static_cast<double>(2 * m + 1); };
    return std::abs(count(lo + 1) - atoms) < std::abs(count(lo) - atoms) ? lo + 1 : lo;
}

struct Geometry {
    double z_tilde = 0.1;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

struct Bundle {
    ModelParams params;
    LatticeSpec lattice;
    Geometry geom;

    friend bool operator==(const Bundle&, const Bundle&) = default;
};

enum class ShiftKind { resonant, off_resonant };

inline const char* to_string(ShiftKind k) { return k == ShiftKind::resonant ? "resonant" : "off_resonant"; }

inline constexpr double detuning_guard = 1e-3;
inline constexpr double rho_guard = 0.1;
inline constexpr double unit_norm_tol = 1e-12;

inline void validate_params(const ModelParams& p)
{
    if (!(p.mu > 0.0) || !std::isfinite(p.mu))
        throw ValidationError("mu must be a positive finite number");
    if (std::abs(1.0 - p.mu) < detuning_guard)
        throw DetuningTooSmall("|1 - mu| < 1e-3: detuning too small for non-degenerate perturbation theory");
    if (!(p.rho > 0.0) || !(p.rho < rho_guard))
        throw CouplingOutOfRange("rho must lie in (0, 0.1)");
    for (const Vec3* d : {&p.test_dipole, &p.array_dipole}) {
        if (!(std::abs(norm(*d) - 1.0) <= unit_norm_tol))
            throw NonUnitDipole("dipole orientation is not a unit vector");
    }
}

inline Bundle validate(const ModelParams& params, const LatticeSpec& lattice, const Geometry& geom)
{
    validate_params(params);
    if (!(lattice.a_tilde > 0.0) || !std::isfinite(lattice.a_tilde))
        throw NonPositiveLength("a_tilde must be positive");
    if (lattice.half_extent < 0)
        throw NonPositiveLength("half_extent must be non-negative");
    if (!(geom.z_tilde > 0.0) || !std::isfinite(geom.z_tilde))
        throw NonPositiveLength("z_tilde must be positive");
    return Bundle{params, lattice, geom};
}

inline Bundle validate(const Bundle& b) { return validate(b.params, b.lattice, b.geom); }

// rho*mu / ((1-mu)(1+mu)), the common factor of every resonant expression.
inline double resonant_strength(const ModelParams& p)
{
    return p.rho * p.mu / ((1.0 - p.mu) * (1.0 + p.mu));
}

// Prefactor of Re[coupling^2] in the resonant pair term.
inline double resonant_prefactor(const ModelParams& p) { return 9.0 / 8.0 * resonant_strength(p); }

// Prefactor of the imaginary-frequency integral in the off-resonant pair term.
inline double offresonant_prefactor(const ModelParams& p)
{
    return 9.0 * p.rho * p.mu / (8.0 * std::numbers::pi);
}

} // namespace cpshift
