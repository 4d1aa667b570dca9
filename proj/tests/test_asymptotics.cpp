#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "cpshift/asymptotics.hpp"
#include "cpshift/euler_maclaurin.hpp"
#include "cpshift/fitting.hpp"

using namespace cpshift;

namespace {

constexpr double pi = std::numbers::pi;

ModelParams zz() { return {0.5, 1e-6, unit_z, unit_z}; }
ModelParams zx() { return {0.5, 1e-6, unit_z, unit_x}; }

Regime regime(ShiftKind k, Orientation o, Retardation t, Density d) { return {k, o, t, d}; }

constexpr auto R = ShiftKind::resonant;
constexpr auto OR = ShiftKind::off_resonant;
constexpr auto ZZ = Orientation::zz;
constexpr auto ZX = Orientation::zx;
constexpr auto NR = Retardation::non_retarded;
constexpr auto RT = Retardation::retarded;
constexpr auto SP = Density::sparse;
constexpr auto DN = Density::dense;

double vertex(const ModelParams& p, double z, ShiftKind k) { return vertex_term(p, {z}, k); }

}

TEST(Regimes, SixteenDistinct)
{
    std::set<std::string> names;
    for (auto o : {ZZ, ZX})
        for (const auto& r : regimes_for(o)) names.insert(to_string(r));
    EXPECT_EQ(names.size(), 16u);
    EXPECT_TRUE(names.count("res_zz_nonret_sparse"));
    EXPECT_TRUE(names.count("off_zx_ret_dense"));
}

TEST(ExpectedExponent, Tables)
{
    EXPECT_EQ(expected_exponent(regime(R, ZZ, NR, SP)), (ScalingLaw{false, -6, 0}));
    EXPECT_EQ(expected_exponent(regime(R, ZZ, NR, DN)), (ScalingLaw{false, -4, -2}));
    EXPECT_EQ(expected_exponent(regime(R, ZZ, RT, SP)), (ScalingLaw{false, -4, 0}));
    EXPECT_EQ(expected_exponent(regime(R, ZZ, RT, DN)), (ScalingLaw{false, -3, -2}));
    EXPECT_EQ(expected_exponent(regime(OR, ZZ, NR, SP)), (ScalingLaw{false, -6, 0}));
    EXPECT_EQ(expected_exponent(regime(OR, ZZ, NR, DN)), (ScalingLaw{false, -4, -2}));
    EXPECT_EQ(expected_exponent(regime(OR, ZZ, RT, SP)), (ScalingLaw{false, -7, 0}));
    EXPECT_EQ(expected_exponent(regime(OR, ZZ, RT, DN)), (ScalingLaw{false, -5, -2}));
    EXPECT_EQ(expected_exponent(regime(R, ZX, NR, DN)), (ScalingLaw{false, -4, -2}));
    EXPECT_EQ(expected_exponent(regime(R, ZX, RT, DN)), (ScalingLaw{false, -2, -2}));
    EXPECT_EQ(expected_exponent(regime(OR, ZX, NR, DN)), (ScalingLaw{false, -4, -2}));
    EXPECT_EQ(expected_exponent(regime(OR, ZX, RT, DN)), (ScalingLaw{false, -5, -2}));
    for (auto k : {R, OR})
        for (auto t : {NR, RT}) EXPECT_TRUE(expected_exponent(regime(k, ZX, t, SP)).vanishes);
}

TEST(AsymptoticShift, SparseNearFieldValue)
{
    const double v = asymptotic_shift(regime(R, ZZ, NR, SP), zz(), {0.01, 0}, {0.01});
    EXPECT_NEAR(v / 3.0e6, 1.0, 1e-12);
    EXPECT_NEAR(vertex(zz(), 0.01, R) / v, 1.0, 1e-3);
}

TEST(AsymptoticShift, SparseOrthogonalVanishes)
{
    for (auto k : {R, OR})
        for (auto t : {NR, RT})
            for (double z : {0.01, 3.0}) EXPECT_EQ(asymptotic_shift(regime(k, ZX, t, SP), zx(), {5.0, 0}, {z}), 0.0);
}

TEST(AsymptoticShift, DenseOffResonantRetardedValue)
{
    const LatticeSpec lat{0.01, 0};
    const double v = asymptotic_shift(regime(OR, ZZ, RT, DN), zz(), lat, {20.0});
    EXPECT_NEAR(v / 5.625e-9, 1.0, 1e-12);
    EXPECT_NEAR(bulk_term(zz(), lat, {20.0}, OR) / v, 1.0, 2e-2);
}

TEST(AsymptoticShift, LinearInCouplingAndLatticePower)
{
    for (auto o : {ZZ, ZX}) {
        auto p = o == ZZ ? zz() : zx();
        for (const auto& r : regimes_for(o)) {
            const auto law = expected_exponent(r);
            if (law.vanishes) continue;
            const Geometry g{0.37};
            const double base = asymptotic_shift(r, p, {0.1, 0}, g);
            auto doubled = p;
            doubled.rho *= 2.0;
            EXPECT_NEAR(asymptotic_shift(r, doubled, {0.1, 0}, g) / base, 2.0, 1e-15) << to_string(r);
            EXPECT_NEAR(std::log2(asymptotic_shift(r, p, {0.2, 0}, g) / base), law.a_power, 1e-12) << to_string(r);
            // z power, away from oscillation nodes
            const double z1 = 0.01, z2 = 0.02;
            if (r.retardation == NR || r.kind == OR) {
                const double s = std::log2(asymptotic_shift(r, p, {0.1, 0}, {z2}) / asymptotic_shift(r, p, {0.1, 0}, {z1}));
                EXPECT_NEAR(s, law.z_power, 1e-12) << to_string(r);
            }
        }
    }
}

TEST(AsymptoticShift, SparseFormsMatchSingleAtom)
{
    EXPECT_NEAR(vertex(zz(), 0.005, R) / asymptotic_shift(regime(R, ZZ, NR, SP), zz(), {1.0, 0}, {0.005}), 1.0, 1e-4);
    EXPECT_NEAR(vertex(zz(), 0.005, OR) / asymptotic_shift(regime(OR, ZZ, NR, SP), zz(), {1.0, 0}, {0.005}), 1.0, 1e-2);
    const double peak = 16 * pi;   // cos 2z = 1
    EXPECT_NEAR(vertex(zz(), peak, R) / asymptotic_shift(regime(R, ZZ, RT, SP), zz(), {1.0, 0}, {peak}), 1.0, 1e-3);
    EXPECT_NEAR(vertex(zz(), 200.0, OR) / asymptotic_shift(regime(OR, ZZ, RT, SP), zz(), {1.0, 0}, {200.0}), 1.0, 1e-2);
}

TEST(AsymptoticShift, DenseFormsMatchBulk)
{
    const LatticeSpec lat{0.01, 0};
    auto check = [&](const ModelParams& p, Regime r, double z, double tol) {
        EXPECT_NEAR(bulk_term(p, lat, {z}, r.kind) / asymptotic_shift(r, p, lat, {z}), 1.0, tol) << to_string(r) << " z=" << z;
    };
    check(zz(), regime(R, ZZ, NR, DN), 0.02, 1e-3);
    check(zx(), regime(R, ZX, NR, DN), 0.02, 1e-3);
    check(zz(), regime(OR, ZZ, NR, DN), 0.005, 1e-2);
    check(zx(), regime(OR, ZX, NR, DN), 0.005, 1e-2);
    check(zz(), regime(R, ZZ, RT, DN), 16 * pi + pi / 4, 2e-2);    // sin 2z = 1
    check(zx(), regime(R, ZX, RT, DN), 16 * pi, 2e-2);             // cos 2z = 1
    check(zz(), regime(OR, ZZ, RT, DN), 40.0, 2e-2);
    check(zx(), regime(OR, ZX, RT, DN), 40.0, 2e-2);
}

TEST(FullClosedForm, SmallHeightLimits)
{
    const LatticeSpec lat{0.01, 0};
    for (double z : {0.01, 0.003}) {
        EXPECT_NEAR(full_closed_form(ZZ, zz(), lat, {z}) / asymptotic_shift(regime(R, ZZ, NR, DN), zz(), lat, {z}), 1.0, 2 * z * z) << z;
        EXPECT_NEAR(full_closed_form(ZX, zx(), lat, {z}) / asymptotic_shift(regime(R, ZX, NR, DN), zx(), lat, {z}), 1.0, 2 * z * z) << z;
    }
}

TEST(FullClosedForm, RetardedEnvelope)
{
    const LatticeSpec lat{0.01, 0};
    std::vector<SamplePoint> pts;
    for (double z = 28.0; z <= 32.0; z += 1e-3) pts.push_back({z, full_closed_form(ZZ, zz(), lat, {z})});
    const auto peaks = local_peaks(pts, {28.0, 32.0});
    ASSERT_GE(peaks.size(), 2u);
    for (const auto& pk : peaks) {
        const double amp = 9 * pi / 4 * resonant_strength(zz()) / (lat.a_tilde * lat.a_tilde * std::pow(pk.z, 3));
        EXPECT_NEAR(std::abs(pk.value) / amp, 1.0, 5e-2) << pk.z;
    }
}

TEST(AsymptoticShift, RetardedPendulationPeriod)
{
    const LatticeSpec lat{0.01, 0};
    for (const auto& [p, r] : {std::pair{zz(), regime(R, ZZ, RT, DN)}, std::pair{zx(), regime(R, ZX, RT, DN)}, std::pair{zz(), regime(R, ZZ, RT, SP)}}) {
        std::vector<SamplePoint> pts;
        for (double z = 5.0; z <= 30.0; z += 0.01) pts.push_back({z, asymptotic_shift(r, p, lat, {z})});
        EXPECT_NEAR(oscillation_period(pts, {5.0, 30.0}), pi, 1e-2 * pi) << to_string(r);
    }
}
