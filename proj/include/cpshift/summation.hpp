#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace cpshift {

// Unevaluated sum hi + lo.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    double value() const { return hi + lo; }
};

inline void two_sum(double a, double b, double& s, double& err)
{
    s = a + b;
    const double bp = s - a;
    err = (a - (s - bp)) + (b - bp);
}

inline DoubleDouble operator+(DoubleDouble a, double b)
{
    double s, e;
    two_sum(a.hi, b, s, e);
    return {s, a.lo + e};
}

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b)
{
    double s, e;
    two_sum(a.hi, b.hi, s, e);
    return {s, a.lo + b.lo + e};
}

// Running Neumaier-style sum.
class CompensatedSum {
public:
    void add(double x) { acc_ = acc_ + x; }
    void add(DoubleDouble x) { acc_ = acc_ + x; }
    double value() const { return acc_.value(); }
    DoubleDouble state() const { return acc_; }

private:
    DoubleDouble acc_;
};

// Fixed-lane compensated sum; lanes are independent so the loop vectorizes,
// and lanes are folded in a fixed order.
inline DoubleDouble lane_sum(std::span<const double> x)
{
    constexpr std::size_t lanes = 8;
    std::array<double, lanes> hi{};
    std::array<double, lanes> lo{};
    const std::size_t n = x.size();
    const std::size_t body = n - n % lanes;
    for (std::size_t i = 0; i < body; i += lanes) {
        for (std::size_t l = 0; l < lanes; ++l) {
            const double v = x[i + l];
            const double s = hi[l] + v;
            const double bp = s - hi[l];
            lo[l] += (hi[l] - (s - bp)) + (v - bp);
            hi[l] = s;
        }
    }
    DoubleDouble out;
    for (std::size_t l = 0; l < lanes; ++l) out = out + DoubleDouble{hi[l], lo[l]};
    for (std::size_t i = body; i < n; ++i) out = out + x[i];
    return out;
}

} // namespace cpshift
