#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "cpshift/errors.hpp"

namespace cpshift {

struct SamplePoint {
    double z = 0.0;
    double value = 0.0;
};

struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;   // ln of the prefactor
    double r_squared = 0.0;
    FitWindow window;
    int points = 0;
};

inline constexpr int min_fit_points = 5;

// Least squares of ln|value| against ln z over points inside the window.
inline FitReport fit_power_law(std::span<const SamplePoint> points, FitWindow window)
{
    std::vector<SamplePoint> used;
    for (const auto& p : points)
        if (p.z >= window.lo && p.z <= window.hi) used.push_back(p);
    if (static_cast<int>(used.size()) < min_fit_points) throw InsufficientPoints("fit_power_law: fewer than 5 points in window");
    for (const auto& p : used) {
        if (!(p.z > 0.0)) throw InsufficientPoints("fit_power_law: z must be positive");
        if (!(std::abs(p.value) > 0.0) || !std::isfinite(p.value)) throw ZeroValue("fit_power_law: zero or non-finite value");
    }
    // Values are taken relative to the first one, so a common factor cancels exactly.
    const double ref = std::abs(used.front().value);
    const auto n = static_cast<double>(used.size());
    std::vector<double> xs, ys;
    for (const auto& p : used) {
        xs.push_back(std::log(p.z));
        ys.push_back(std::log(std::abs(p.value) / ref));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw InsufficientPoints("fit_power_law: all points share one z");
    FitReport out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx + std::log(ref);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (my + out.slope * (xs[i] - mx));
        ss_res += e * e;
    }
    out.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    out.window = window;
    out.points = static_cast<int>(used.size());
    return out;
}

inline std::vector<SamplePoint> sorted_in_window(std::span<const SamplePoint> points, FitWindow window)
{
    std::vector<SamplePoint> out;
    for (const auto& p : points)
        if (p.z >= window.lo && p.z <= window.hi) out.push_back(p);
    std::sort(out.begin(), out.end(), [](const SamplePoint& a, const SamplePoint& b) { return a.z < b.z; });
    return out;
}

// Three-point local maxima of |value|.
inline std::vector<SamplePoint> local_peaks(std::span<const SamplePoint> points, FitWindow window)
{
    const auto pts = sorted_in_window(points, window);
    std::vector<SamplePoint> peaks;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double a = std::abs(pts[i - 1].value), b = std::abs(pts[i].value), c = std::abs(pts[i + 1].value);
        if (b > a && b >= c) peaks.push_back({pts[i].z, b});
    }
    return peaks;
}

inline FitReport envelope_fit(std::span<const SamplePoint> points, FitWindow window)
{
    const auto peaks = local_peaks(points, window);
    if (static_cast<int>(peaks.size()) < min_fit_points) throw TooFewPeaks("envelope_fit: fewer than 5 peaks in window");
    return fit_power_law(peaks, window);
}

// Twice the mean spacing of sign changes, located by linear interpolation.
inline double oscillation_period(std::span<const SamplePoint> points, FitWindow window)
{
    const auto pts = sorted_in_window(points, window);
    std::vector<double> zeros;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i].value, b = pts[i + 1].value;
        if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
            if (b == 0.0) continue;
            zeros.push_back(pts[i].z + (pts[i + 1].z - pts[i].z) * a / (a - b));
        }
    }
    if (zeros.size() < 3) throw TooFewPeaks("oscillation_period: fewer than three sign changes");
    return 2.0 * (zeros.back() - zeros.front()) / static_cast<double>(zeros.size() - 1);
}

} // namespace cpshift
