#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cpshift/asymptotics.hpp"
#include "cpshift/errors.hpp"
#include "cpshift/greens.hpp"
#include "cpshift/lattice_sum.hpp"
#include "cpshift/model.hpp"
#include "cpshift/quadrature.hpp"
#include "cpshift/specfun.hpp"

namespace cpshift {

struct ShiftBreakdown {
    double bulk = 0.0;
    double edge = 0.0;
    double vertex = 0.0;
    double total = 0.0;
};

struct IntegrationOptions {
    QuadOptions outer{0.0, 1e-10, 4000};
    QuadOptions inner{0.0, 1e-12, 4000};
};

namespace detail {

// Azimuthal means of p = (e0.n)(en.n) over a ring of in-plane radius^2 rho2
// at height z (r^2 = rho2 + z^2). Works for complex rho2.
template <class T>
struct RingMeans {
    T p;
    T p2;
};

template <class T>
RingMeans<T> ring_means(const ModelParams& prm, T rho2, double z2)
{
    const Vec3& e = prm.test_dipole;
    const Vec3& d = prm.array_dipole;
    auto m = [&](int i, int j) { return 0.5 * (e[i] * d[j] + e[j] * d[i]); };
    const double mxx = m(0, 0), myy = m(1, 1), mzz = m(2, 2), mxy = m(0, 1), mxz = m(0, 2), myz = m(1, 2);
    const T r2 = rho2 + z2;
    const T mean = (0.5 * (mxx + myy) * rho2 + mzz * z2) / r2;
    const double q4 = (3.0 * mxx * mxx + 3.0 * myy * myy + 4.0 * mxy * mxy + 2.0 * mxx * myy) / 8.0;
    const double q2 = 2.0 * (mxz * mxz + myz * myz) + mzz * (mxx + myy);
    const T mean_sq = (q4 * rho2 * rho2 + q2 * rho2 * z2 + mzz * mzz * z2 * z2) / (r2 * r2);
    return {mean, mean_sq};
}

inline void require_even(const ModelParams& p)
{
    if (!plane_parity(p).both())
        throw ParityViolation("dipole orientations give a pair term that is not even in x and y; the bulk/edge/vertex split does not apply");
}

inline std::vector<double> radial_breaks(double z)
{
    std::vector<double> br{0.0, z};
    if (z < 1.0) br.push_back(1.0);
    return br;
}

} // namespace detail

// Radial integral of the ring-averaged resonant term, (2 pi / a^2) int_z^inf r <f> dr,
// evaluated along r = z + i t where the integrand decays like e^{-2t}.
inline double resonant_bulk_quadrature(const ModelParams& p, const LatticeSpec& lat, const Geometry& g,
                                       const QuadOptions& opt = {0.0, 1e-12, 4000})
{
    const double z = g.z_tilde;
    const double z2 = z * z;
    const double c = dot(p.test_dipole, p.array_dipole);
    const cplx i{0.0, 1.0};
    auto h = [&](double t) {
        const cplx r = z + i * t;
        const auto gs = green_scalars(r, cplx{1.0, 0.0});
        const auto mean = detail::ring_means<cplx>(p, r * r - z2, z2);
        return r * (gs.isotropic * gs.isotropic * (c * c) + 2.0 * c * gs.isotropic * gs.directional * mean.p +
                    gs.directional * gs.directional * mean.p2);
    };
    const auto res = integrate_to_infinity(h, detail::radial_breaks(z), opt);
    const double radial = (i * res.value).real();
    return 2.0 * std::numbers::pi / (lat.a_tilde * lat.a_tilde) * resonant_prefactor(p) * radial;
}

// int_0^inf f(x, 0) dx + int_0^inf f(0, y) dy for the resonant term; the real
// segment [0, z] is followed by the vertical ray x = z + i t.
inline double resonant_axis_integrals(const ModelParams& p, const Geometry& g, const QuadOptions& opt = {0.0, 1e-12, 4000})
{
    const double z = g.z_tilde;
    const cplx one{1.0, 0.0};
    const cplx i{0.0, 1.0};
    double total = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        auto coupling_sq = [&](cplx x) {
            std::array<cplx, 3> v{cplx{0.0}, cplx{0.0}, cplx{-z}};
            v[axis] = x;
            const cplx gc = pair_coupling(p.test_dipole, p.array_dipole, v, one);
            return gc * gc;
        };
        const auto seg = integrate([&](double x) { return coupling_sq(cplx{x, 0.0}); }, 0.0, z, opt);
        const auto ray = integrate_to_infinity([&](double t) { return coupling_sq(z + i * t); }, detail::radial_breaks(z), opt);
        total += (seg.value + i * ray.value).real();
    }
    return resonant_prefactor(p) * total;
}

// (2 pi / a^2) int_z^inf r <f> dr for the off-resonant term, nested adaptive quadrature.
inline double offresonant_bulk_quadrature(const ModelParams& p, const LatticeSpec& lat, const Geometry& g,
                                          const IntegrationOptions& opt = {})
{
    const double z = g.z_tilde;
    const double z2 = z * z;
    const double c = dot(p.test_dipole, p.array_dipole);
    auto radial = [&](double r) {
        const auto m = offresonant_moments(r, p.mu, opt.inner);
        const auto mean = detail::ring_means<double>(p, r * r - z2, z2);
        return r * (c * c * m.aa + 2.0 * c * mean.p * m.ab + mean.p2 * m.bb);
    };
    std::vector<double> br{z, 2.0 * z};
    if (2.0 * z < 1.0) br.push_back(1.0);
    const auto res = integrate_to_infinity(radial, br, opt.outer);
    return 2.0 * std::numbers::pi / (lat.a_tilde * lat.a_tilde) * offresonant_prefactor(p) * res.value;
}

inline double offresonant_axis_integrals(const ModelParams& p, const Geometry& g, const IntegrationOptions& opt = {})
{
    const double z = g.z_tilde;
    double total = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        auto f = [&](double x) {
            Vec3 v{0.0, 0.0, -z};
            (axis == 0 ? v.x : v.y) = x;
            const auto m = offresonant_moments(norm(v), p.mu, opt.inner);
            return offresonant_from_moments(p, v, m);
        };
        total += integrate_to_infinity(f, detail::radial_breaks(z), opt.outer).value;
    }
    return total;
}

// Bulk for parallel z dipoles with the radial integral done in closed form
// (exponential-integral route); kept as an independent check.
inline double offresonant_bulk_zz_exponential_integral_form(const ModelParams& p, const LatticeSpec& lat, const Geometry& g,
                                                            const QuadOptions& opt = {0.0, 1e-12, 4000})
{
    const double z = g.z_tilde;
    const double z4 = z * z * z * z;
    const double mu = p.mu;
    auto f = [&](double xi) {
        const double x = 2.0 * z * xi;
        if (x > 700.0) return 0.0;
        const double poly = 3.0 + 3.0 * x + 0.5 * x * x - 0.5 * x * x * x;
        const double radial = (std::exp(-x) * poly - 0.5 * x * x * x * x * chi_minus_shi(x)) / (8.0 * z4);
        return radial / ((xi * xi + 1.0) * (xi * xi + mu * mu));
    };
    std::vector<double> br{mu, 1.0, 1.0 / z};
    std::sort(br.begin(), br.end());
    br.insert(br.begin(), 0.0);
    const auto res = integrate_to_infinity(f, br, opt);
    return 2.0 * std::numbers::pi / (lat.a_tilde * lat.a_tilde) * offresonant_prefactor(p) * res.value;
}

inline double bulk_term(const ModelParams& p, const LatticeSpec& lat, const Geometry& g, ShiftKind kind,
                        const IntegrationOptions& opt = {})
{
    validate(p, lat, g);
    detail::require_even(p);
    if (kind == ShiftKind::resonant) {
        switch (fast_path_for(p)) {
        case FastPath::zz: return full_closed_form(Orientation::zz, p, lat, g);
        case FastPath::zx: return full_closed_form(Orientation::zx, p, lat, g);
        case FastPath::none: break;
        }
        return resonant_bulk_quadrature(p, lat, g, opt.inner);
    }
    return offresonant_bulk_quadrature(p, lat, g, opt);
}

inline double edge_term(const ModelParams& p, const LatticeSpec& lat, const Geometry& g, ShiftKind kind,
                        const IntegrationOptions& opt = {})
{
    validate(p, lat, g);
    detail::require_even(p);
    const double line = kind == ShiftKind::resonant ? resonant_axis_integrals(p, g, opt.inner) : offresonant_axis_integrals(p, g, opt);
    return 2.0 / lat.a_tilde * line;
}

inline double vertex_term(const ModelParams& p, const Geometry& g, ShiftKind kind, const QuadOptions& opt = {0.0, 1e-10, 4000})
{
    validate_params(p);
    if (!(g.z_tilde > 0.0)) throw NonPositiveLength("z_tilde must be positive");
    const Vec3 v{0.0, 0.0, -g.z_tilde};
    return kind == ShiftKind::resonant ? resonant_pair_term(p, v) : offresonant_pair_term(p, v, opt);
}

inline ShiftBreakdown decompose(const ModelParams& p, const LatticeSpec& lat, const Geometry& g, ShiftKind kind,
                                const IntegrationOptions& opt = {})
{
    ShiftBreakdown b;
    b.bulk = bulk_term(p, lat, g, kind, opt);
    b.edge = edge_term(p, lat, g, kind, opt);
    b.vertex = vertex_term(p, g, kind, opt.outer);
    b.total = b.bulk + b.edge + b.vertex;
    return b;
}

} // namespace cpshift
