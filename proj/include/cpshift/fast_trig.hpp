#pragma once

#include <cmath>

namespace cpshift::fast {

// Arguments above this fall back to std::sin / std::cos.
inline constexpr double sincos_limit = 1.0e6;

// Round to nearest for |v| < 2^51 using only adds (vectorizes, unlike floor).
[[gnu::always_inline]] inline double round_nearest(double v)
{
    constexpr double shifter = 6755399441055744.0;   // 1.5 * 2^52
    return (v + shifter) - shifter;
}

// Branch-free sin/cos for 0 <= x <= sincos_limit, written so GCC can
// vectorize loops that call it. Cody-Waite reduction by pi/2 with a
// three-part constant, then the usual minimax kernels on [-pi/4, pi/4].
[[gnu::always_inline]] inline void sincos(double x, double& s, double& c)
{
    constexpr double two_over_pi = 6.36619772367581382433e-01;
    constexpr double pio2_1 = 1.57079632673412561417e+00;
    constexpr double pio2_2 = 6.07710050630396597660e-11;
    constexpr double pio2_2t = 2.02226624879595063154e-21;

    constexpr double S1 = -1.66666666666666324348e-01;
    constexpr double S2 = 8.33333333332248946124e-03;
    constexpr double S3 = -1.98412698298579493134e-04;
    constexpr double S4 = 2.75573137070700676789e-06;
    constexpr double S5 = -2.50507602534068634195e-08;
    constexpr double S6 = 1.58969099521155010221e-10;

    constexpr double C1 = 4.16666666666666019037e-02;
    constexpr double C2 = -1.38888888888741095749e-03;
    constexpr double C3 = 2.48015872894767294178e-05;
    constexpr double C4 = -2.75573143513906633035e-07;
    constexpr double C5 = 2.08757232129817482790e-09;
    constexpr double C6 = -1.13596475577881948265e-11;

    const double k = round_nearest(x * two_over_pi);
    const double y = ((x - k * pio2_1) - k * pio2_2) - k * pio2_2t;
    const double q = k - 4.0 * round_nearest(0.25 * k - 0.375);   // k mod 4

    const double z = y * y;
    const double sp = y + y * z * (S1 + z * (S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)))));
    const double hz = 0.5 * z;
    const double w = 1.0 - hz;
    const double cr = z * z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
    const double cp = w + (((1.0 - w) - hz) + cr);

    // Quadrant select by exact 0/1 blends.
    const double half = round_nearest(0.5 * q - 0.25);   // q >= 2
    const double odd = q - 2.0 * half;
    const double q1 = q + 1.0;
    const double m = q1 - 4.0 * round_nearest(0.25 * q1 - 0.375);
    const double cneg = round_nearest(0.5 * m - 0.25);   // q == 1 or q == 2
    const double s0 = (1.0 - odd) * sp + odd * cp;
    const double c0 = (1.0 - odd) * cp + odd * sp;
    s = (1.0 - 2.0 * half) * s0;
    c = (1.0 - 2.0 * cneg) * c0;
}

} // namespace cpshift::fast
