#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "cpshift/errors.hpp"
#include "cpshift/model.hpp"

namespace cpshift {

using cplx = std::complex<double>;

// g = (4 pi / k) G, so that g = e^{ikr}/r [a delta + b n n].
struct DyadicTensor {
    std::array<std::array<cplx, 3>, 3> entries{};

    cplx operator()(int row, int col) const { return entries[row][col]; }
};

// Scalar parts of the dimensionless tensor: g = isotropic * delta + directional * n n.
struct GreenScalars {
    cplx isotropic;
    cplx directional;
};

// Valid for complex separation too (principal branch), which the contour
// integrations rely on.
inline GreenScalars green_scalars(cplx r, cplx k)
{
    const cplx i{0.0, 1.0};
    const cplx kr = k * r;
    const cplx inv_kr2 = 1.0 / (kr * kr);
    const cplx phase = std::exp(i * kr) / r;
    return {phase * (1.0 + (i * kr - 1.0) * inv_kr2), phase * (-1.0 + (3.0 - 3.0 * i * kr) * inv_kr2)};
}

inline DyadicTensor green_dyadic(const Vec3& direction, double r_tilde, cplx k)
{
    if (!(r_tilde > 0.0)) throw ZeroSeparation("green_dyadic: separation must be positive");
    if (std::abs(norm(direction) - 1.0) > unit_norm_tol) throw NonUnitDipole("green_dyadic: direction is not a unit vector");
    if (k == cplx{0.0, 0.0}) throw DomainError("green_dyadic: zero frequency");
    const auto s = green_scalars(r_tilde, k);
    DyadicTensor g;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            g.entries[a][b] = s.directional * (direction[a] * direction[b]);
            if (a == b) g.entries[a][b] += s.isotropic;
        }
    }
    return g;
}

// e0 . g(v) . en
inline cplx pair_coupling(const Vec3& test_dipole, const Vec3& array_dipole, const Vec3& displacement, cplx k)
{
    const double r = norm(displacement);
    if (!(r > 0.0)) throw ZeroSeparation("pair_coupling: zero displacement");
    if (k == cplx{0.0, 0.0}) throw DomainError("pair_coupling: zero frequency");
    const auto s = green_scalars(r, k);
    const double along = dot(test_dipole, displacement) * dot(array_dipole, displacement) / (r * r);
    return s.isotropic * dot(test_dipole, array_dipole) + s.directional * along;
}

// Same projection for a complexified displacement (used along rotated contours).
inline cplx pair_coupling(const Vec3& test_dipole, const Vec3& array_dipole, const std::array<cplx, 3>& v, cplx k)
{
    const cplx r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const cplx r = std::sqrt(r2);
    const auto s = green_scalars(r, k);
    const cplx pa = test_dipole.x * v[0] + test_dipole.y * v[1] + test_dipole.z * v[2];
    const cplx pb = array_dipole.x * v[0] + array_dipole.y * v[1] + array_dipole.z * v[2];
    return s.isotropic * dot(test_dipole, array_dipole) + s.directional * (pa * pb / r2);
}

} // namespace cpshift
