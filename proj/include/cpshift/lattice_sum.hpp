#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cpshift/errors.hpp"
#include "cpshift/fast_trig.hpp"
#include "cpshift/greens.hpp"
#include "cpshift/model.hpp"
#include "cpshift/quadrature.hpp"
#include "cpshift/summation.hpp"

namespace cpshift {

struct ShiftResult {
    double resonant = 0.0;
    double off_resonant = 0.0;
    std::int64_t terms_summed = 0;
};

struct SumOptions {
    unsigned threads = 1;   // 0 picks the hardware concurrency
    QuadOptions quad{0.0, 1e-10, 4000};
};

// Displacement from the test atom to site (nx, ny).
inline Vec3 site_displacement(std::int64_t nx, std::int64_t ny, const LatticeSpec& lat, const Geometry& g)
{
    return {static_cast<double>(nx) * lat.a_tilde, static_cast<double>(ny) * lat.a_tilde, -g.z_tilde};
}

inline double resonant_pair_term(const ModelParams& p, const Vec3& v)
{
    const cplx g = pair_coupling(p.test_dipole, p.array_dipole, v, cplx{1.0, 0.0});
    return resonant_prefactor(p) * (g * g).real();
}

inline double resonant_pair_term(std::int64_t nx, std::int64_t ny, const ModelParams& p, const LatticeSpec& lat, const Geometry& g)
{
    return resonant_pair_term(p, site_displacement(nx, ny, lat, g));
}

// Imaginary-frequency moments of the squared coupling at separation r, already divided by r^6:
// aa = int w e^{-2 xi r} A^2, ab = -int w e^{-2 xi r} A B, bb = int w e^{-2 xi r} B^2,
// with w = 1/((xi^2+1)(xi^2+mu^2)), A = (xi r)^2 + xi r + 1, B = (xi r)^2 + 3 xi r + 3.
struct OffResonantMoments {
    double aa = 0.0;
    double ab = 0.0;
    double bb = 0.0;
};

inline std::array<double, 3> offresonant_integrand(double xi, double r, double mu)
{
    const double e = std::exp(-2.0 * xi * r);
    if (e == 0.0) return {0.0, 0.0, 0.0};
    const double x2 = xi * xi;
    const double w = e / ((x2 + 1.0) * (x2 + mu * mu));
    const double xr = xi * r;
    const double a = xr * xr + xr + 1.0;
    const double b = xr * xr + 3.0 * xr + 3.0;
    return {w * a * a, -w * a * b, w * b * b};
}

inline OffResonantMoments offresonant_moments(double r, double mu, const QuadOptions& opt = {0.0, 1e-10, 4000})
{
    if (!(r > 0.0)) throw ZeroSeparation("offresonant_moments: zero separation");
    std::vector<double> br{mu, 1.0, 1.0 / r};
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    br.insert(br.begin(), 0.0);
    const auto res = integrate_to_infinity([r, mu](double xi) { return offresonant_integrand(xi, r, mu); }, br, opt);
    const double r2 = r * r;
    const double r6 = r2 * r2 * r2;
    return {res.value[0] / r6, res.value[1] / r6, res.value[2] / r6};
}

inline double offresonant_from_moments(const ModelParams& p, const Vec3& v, const OffResonantMoments& m)
{
    const double r2 = dot(v, v);
    const double c = dot(p.test_dipole, p.array_dipole);
    const double along = dot(p.test_dipole, v) * dot(p.array_dipole, v) / r2;
    return offresonant_prefactor(p) * (c * c * m.aa + 2.0 * c * along * m.ab + along * along * m.bb);
}

inline double offresonant_pair_term(const ModelParams& p, const Vec3& v, const QuadOptions& opt = {0.0, 1e-10, 4000})
{
    const double r = norm(v);
    if (!(r > 0.0)) throw ZeroSeparation("offresonant_pair_term: zero separation");
    return offresonant_from_moments(p, v, offresonant_moments(r, p.mu, opt));
}

inline double offresonant_pair_term(std::int64_t nx, std::int64_t ny, const ModelParams& p, const LatticeSpec& lat,
                                    const Geometry& g, const QuadOptions& opt = {0.0, 1e-10, 4000})
{
    return offresonant_pair_term(p, site_displacement(nx, ny, lat, g), opt);
}

// Reflection parity of the pair term in the lattice plane.
struct PlaneParity {
    bool even_x = false;
    bool even_y = false;

    bool both() const { return even_x && even_y; }
};

inline PlaneParity plane_parity(const ModelParams& p)
{
    constexpr double tol = 1e-14;
    const Vec3& e = p.test_dipole;
    const Vec3& d = p.array_dipole;
    auto m = [&](int i, int j) { return 0.5 * (e[i] * d[j] + e[j] * d[i]); };
    auto zero = [](double v) { return std::abs(v) < tol; };
    const bool c0 = zero(dot(e, d));
    PlaneParity out;
    out.even_x = (zero(m(0, 1)) && zero(m(0, 2))) || (c0 && zero(m(0, 0)) && zero(m(1, 1)) && zero(m(2, 2)) && zero(m(1, 2)));
    out.even_y = (zero(m(0, 1)) && zero(m(1, 2))) || (c0 && zero(m(0, 0)) && zero(m(1, 1)) && zero(m(2, 2)) && zero(m(0, 2)));
    return out;
}

enum class FastPath { none, zz, zx };

inline FastPath fast_path_for(const ModelParams& p)
{
    auto along = [](const Vec3& v, int axis) {
        for (int i = 0; i < 3; ++i) {
            if (i == axis ? std::abs(v[i]) != 1.0 : v[i] != 0.0) return false;
        }
        return true;
    };
    const Vec3& e = p.test_dipole;
    const Vec3& d = p.array_dipole;
    if (along(e, 2) && along(d, 2)) return FastPath::zz;
    const bool ez = along(e, 2), dz = along(d, 2);
    const bool e_plane = along(e, 0) || along(e, 1);
    const bool d_plane = along(d, 0) || along(d, 1);
    if ((ez && d_plane) || (dz && e_plane)) return FastPath::zx;
    return FastPath::none;
}

// Pair-term evaluations actually performed for a lattice of half-extent M.
inline double reduced_term_count(const ModelParams& p, std::int64_t M)
{
    const double m = static_cast<double>(M);
    if (plane_parity(p).both()) return (m + 1.0) * (m + 2.0) / 2.0;
    return (2.0 * m + 1.0) * (2.0 * m + 1.0);
}

namespace detail {

// Re[e^{2ir} (P + iQ)^2] / r^6 for parallel z dipoles, without prefactor.
template <bool Fast>
[[gnu::always_inline]] inline double zz_kernel(double r2, double z2)
{
    const double r = std::sqrt(r2);
    const double u = z2 / r2;
    const double pr = r2 - 1.0 + (3.0 - r2) * u;
    const double qi = r * (1.0 - 3.0 * u);
    double s, c;
    if constexpr (Fast) {
        fast::sincos(2.0 * r, s, c);
    } else {
        s = std::sin(2.0 * r);
        c = std::cos(2.0 * r);
    }
    const double inv = 1.0 / (r2 * r2 * r2);
    return (c * (pr * pr - qi * qi) - s * 2.0 * pr * qi) * inv;
}

// f(nx, ny) + f(ny, nx) for a z test dipole over in-plane array dipoles, without prefactor.
template <bool Fast>
[[gnu::always_inline]] inline double zx_pair_kernel(double r2, double z2, double rho2)
{
    const double r = std::sqrt(r2);
    const double pr = 3.0 - r2;
    const double qi = -3.0 * r;
    double s, c;
    if constexpr (Fast) {
        fast::sincos(2.0 * r, s, c);
    } else {
        s = std::sin(2.0 * r);
        c = std::cos(2.0 * r);
    }
    const double r4 = r2 * r2;
    const double inv = 1.0 / (r4 * r4 * r2);
    return (c * (pr * pr - qi * qi) - s * 2.0 * pr * qi) * z2 * rho2 * inv;
}

template <bool Fast>
inline void fill_zz_shell(double* buf, std::int64_t s, double a2, double z2)
{
    const double s2 = static_cast<double>(s) * static_cast<double>(s);
    const int n = static_cast<int>(s) + 1;
    for (int j = 0; j < n; ++j) {
        const double jd = j;
        const double r2 = (s2 + jd * jd) * a2 + z2;
        buf[j] = 8.0 * zz_kernel<Fast>(r2, z2);
    }
}

template <bool Fast>
inline void fill_zx_shell(double* buf, std::int64_t s, double a2, double z2)
{
    const double s2 = static_cast<double>(s) * static_cast<double>(s);
    const int n = static_cast<int>(s) + 1;
    for (int j = 0; j < n; ++j) {
        const double jd = j;
        const double rho2 = (s2 + jd * jd) * a2;
        buf[j] = 4.0 * zx_pair_kernel<Fast>(rho2 + z2, z2, rho2);
    }
}

// Runs shell(state, s) for s = 0..M on a pool of workers and folds the
// per-shell partials in increasing s, so the result is independent of the
// worker count.
template <class MakeState, class Shell>
std::vector<DoubleDouble> run_shells(std::int64_t M, unsigned threads, MakeState make_state, Shell shell)
{
    std::vector<DoubleDouble> parts(static_cast<std::size_t>(M + 1));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    auto work = [&]() {
        try {
            auto state = make_state();
            for (;;) {
                const std::int64_t k = next.fetch_add(1);
                if (k > M) break;
                const std::int64_t s = M - k;   // biggest shells first
                parts[static_cast<std::size_t>(s)] = shell(state, s);
            }
        } catch (...) {
            std::lock_guard lock(error_lock);
            if (!error) error = std::current_exception();
            next.store(M + 1);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto n = static_cast<unsigned>(std::min<std::int64_t>(threads, M + 1));
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return parts;
}

// Sites of shell s in a fixed order: top and bottom rows, then the side columns.
template <class Visit>
void for_each_shell_site(std::int64_t s, Visit visit)
{
    if (s == 0) {
        visit(0, 0);
        return;
    }
    for (std::int64_t x = -s; x <= s; ++x) visit(x, -s);
    for (std::int64_t x = -s; x <= s; ++x) visit(x, s);
    for (std::int64_t y = -s + 1; y <= s - 1; ++y) visit(-s, y);
    for (std::int64_t y = -s + 1; y <= s - 1; ++y) visit(s, y);
}

struct ResonantState {
    std::vector<double> buf;
};

inline DoubleDouble resonant_shell(ResonantState& st, std::int64_t s, const ModelParams& p, const LatticeSpec& lat,
                                   const Geometry& g, FastPath path, bool folded)
{
    const double z2 = g.z_tilde * g.z_tilde;
    const double a2 = lat.a_tilde * lat.a_tilde;
    if (path != FastPath::none) {
        const double pref = resonant_prefactor(p);
        if (s == 0) return {resonant_pair_term(0, 0, p, lat, g), 0.0};
        st.buf.resize(static_cast<std::size_t>(s + 1));
        double* buf = st.buf.data();
        const double sd = static_cast<double>(s);
        const double rmax = std::sqrt(2.0 * sd * sd * a2 + z2);
        const bool fast_ok = 2.0 * rmax <= fast::sincos_limit;
        if (path == FastPath::zz) {
            fast_ok ? fill_zz_shell<true>(buf, s, a2, z2) : fill_zz_shell<false>(buf, s, a2, z2);
        } else {
            fast_ok ? fill_zx_shell<true>(buf, s, a2, z2) : fill_zx_shell<false>(buf, s, a2, z2);
        }
        buf[0] *= 0.5;
        buf[s] *= 0.5;
        const DoubleDouble sum = lane_sum(std::span<const double>(buf, static_cast<std::size_t>(s + 1)));
        return {pref * sum.hi, pref * sum.lo};
    }
    CompensatedSum acc;
    if (folded) {
        if (s == 0) return {resonant_pair_term(0, 0, p, lat, g), 0.0};
        for (std::int64_t j = 0; j <= s; ++j) {
            const double pair = resonant_pair_term(s, j, p, lat, g) + resonant_pair_term(j, s, p, lat, g);
            acc.add((j == 0 || j == s ? 2.0 : 4.0) * pair);
        }
        return acc.state();
    }
    for_each_shell_site(s, [&](std::int64_t x, std::int64_t y) { acc.add(resonant_pair_term(x, y, p, lat, g)); });
    return acc.state();
}

struct OffResonantState {
    std::unordered_map<std::int64_t, OffResonantMoments> cache;
};

inline const OffResonantMoments& cached_moments(OffResonantState& st, std::int64_t n2, const ModelParams& p,
                                                const LatticeSpec& lat, const Geometry& g, const QuadOptions& opt)
{
    auto it = st.cache.find(n2);
    if (it != st.cache.end()) return it->second;
    const double r = std::sqrt(static_cast<double>(n2) * lat.a_tilde * lat.a_tilde + g.z_tilde * g.z_tilde);
    return st.cache.emplace(n2, offresonant_moments(r, p.mu, opt)).first->second;
}

inline DoubleDouble offresonant_shell(OffResonantState& st, std::int64_t s, const ModelParams& p, const LatticeSpec& lat,
                                      const Geometry& g, bool folded, const QuadOptions& opt)
{
    auto term = [&](std::int64_t x, std::int64_t y) {
        const auto& m = cached_moments(st, x * x + y * y, p, lat, g, opt);
        return offresonant_from_moments(p, site_displacement(x, y, lat, g), m);
    };
    CompensatedSum acc;
    if (folded) {
        if (s == 0) return {term(0, 0), 0.0};
        for (std::int64_t j = 0; j <= s; ++j) acc.add((j == 0 || j == s ? 2.0 : 4.0) * (term(s, j) + term(j, s)));
        return acc.state();
    }
    for_each_shell_site(s, [&](std::int64_t x, std::int64_t y) { acc.add(term(x, y)); });
    return acc.state();
}

} // namespace detail

// Per-shell partial sums, shell s = max(|nx|, |ny|).
inline std::vector<DoubleDouble> shell_sums(const ModelParams& p, const LatticeSpec& lat, const Geometry& g, ShiftKind kind,
                                            const SumOptions& opt = {})
{
    validate(p, lat, g);
    const bool folded = plane_parity(p).both();
    if (kind == ShiftKind::resonant) {
        const FastPath path = fast_path_for(p);
        return detail::run_shells(
            lat.half_extent, opt.threads, [] { return detail::ResonantState{}; },
            [&](detail::ResonantState& st, std::int64_t s) { return detail::resonant_shell(st, s, p, lat, g, path, folded); });
    }
    return detail::run_shells(
        lat.half_extent, opt.threads, [] { return detail::OffResonantState{}; },
        [&](detail::OffResonantState& st, std::int64_t s) { return detail::offresonant_shell(st, s, p, lat, g, folded, opt.quad); });
}

inline ShiftResult sum_lattice(const ModelParams& p, const LatticeSpec& lat, const Geometry& g, ShiftKind kind,
                               const SumOptions& opt = {})
{
    DoubleDouble total;
    for (const auto& part : shell_sums(p, lat, g, kind, opt)) total = total + part;
    ShiftResult out;
    (kind == ShiftKind::resonant ? out.resonant : out.off_resonant) = total.value();
    out.terms_summed = lat.side() * lat.side();
    return out;
}

} // namespace cpshift
