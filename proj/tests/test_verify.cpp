// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "peripore/verify.hpp"

using namespace peripore::oracle;

namespace {

constexpr double kK = 2.1e5, kMu = 9.8e4, kKw = 2.2e6, kPhi = 0.48;

double solid_ratio(int dim, int res) {
    const double delta = 0.082, pi = std::numbers::pi;
    double C = 0.0;
    if (dim == 1) C = 2.0 * (kK + 4.0 * kMu / 3.0) / (delta * delta);
    else if (dim == 2) C = 12.0 * (kK + kMu / 3.0) / (pi * std::pow(delta, 3));
    else C = 18.0 * kK / (pi * std::pow(delta, 4));
    return energy_equivalence_quadrature(EnergyKind::Solid, dim, C, delta, res,
                                         classical_solid_energy(dim, kK, kMu));
}

double fluid_ratio(int dim, int res) {
    const double delta = 0.082, k = 3.55e-5, pi = std::numbers::pi;
    double Kp = 0.0;
    if (dim == 1) Kp = 2.0 * k / (delta * delta);
    else if (dim == 2) Kp = 6.0 * k / (pi * std::pow(delta, 3));
    else Kp = 6.0 * k / (pi * std::pow(delta, 4));
    return energy_equivalence_quadrature(EnergyKind::Fluid, dim, Kp, delta, res, classical_fluid_energy(dim, k));
}

BruteForceInput line(int n) {
    BruteForceInput in;
    in.dim = 1;
    in.delta = 0.205;
    in.K = kK;
    in.mu = kMu;
    in.k_w = 1e-3;
    in.K_w = kKw;
    in.phi = 0.4;
    in.rho = 2.02;
    in.C = 1e8;
    in.Kp = 0.1;
    for (int i = 0; i < n; ++i) {
        in.x.emplace_back(0.1 * i, 0, 0);
        in.volume.push_back(0.1);
        in.u.emplace_back(0, 0, 0);
        in.v.emplace_back(0, 0, 0);
        in.a.emplace_back(0, 0, 0);
        in.body.emplace_back(0, 0, 0);
        in.p.push_back(0.0);
        in.pdot.push_back(0.0);
    }
    return in;
}

}  // namespace

TEST(EnergyQuadrature, ThreeDimensionalSolidAndFluid) {
    const double s = solid_ratio(3, 8), f = fluid_ratio(3, 8);
    EXPECT_GE(s, 0.95);
    EXPECT_LE(s, 1.05);
    EXPECT_GE(f, 0.95);
    EXPECT_LE(f, 1.05);
}

TEST(EnergyQuadrature, LowerDimensions) {
    for (int d : {1, 2}) {
        EXPECT_NEAR(solid_ratio(d, 16), 1.0, 0.05) << d;
        EXPECT_NEAR(fluid_ratio(d, 16), 1.0, 0.05) << d;
    }
}

TEST(EnergyQuadrature, ConvergesMonotonically) {
    for (int d : {2, 3}) {
        double prev = 1e300;
        for (int res : {8, 16, 32}) {
            const double e = std::abs(solid_ratio(d, res) - 1.0);
            EXPECT_LE(e, prev) << "d=" << d << " res=" << res;
            prev = e;
        }
    }
}

TEST(ColumnOracles, OedometricSettlement) {
    EXPECT_NEAR(oedometric_settlement(1.0, 10.0, kK, kMu), 10.0 / 3.40667e5, 1e-9);
    EXPECT_NEAR(oedometric_settlement(1.0, 10.0, kK, kMu), 2.9354e-5, 1e-9);
    EXPECT_EQ(oedometric_settlement(0.0, 10.0, kK, kMu), 0.0);
    EXPECT_DOUBLE_EQ(oedometric_settlement(1.0, 20.0, kK, kMu), 2.0 * oedometric_settlement(1.0, 10.0, kK, kMu));
}

TEST(ColumnOracles, UndrainedPressure) {
    EXPECT_NEAR(undrained_pressure(1.0, kPhi, kKw, kK, kMu), 0.931, 5e-4);
    EXPECT_NEAR(undrained_pressure(1.0, kPhi, 1e20, kK, kMu), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(undrained_pressure(1.0, 1.0, kKw, kK, kMu), kKw / (kKw + kK + 4.0 * kMu / 3.0));
}

TEST(BruteForce, ZeroFieldsGiveZeroResidual) {
    const auto r = brute_force_residual(line(8));
    for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(BruteForce, GainDifferenceIsStabilizationOnly) {
    auto in = line(8);
    for (int i = 0; i < 8; ++i) {
        in.u[std::size_t(i)][0] = 1e-4 * std::sin(1.3 * i * i);
        in.p[std::size_t(i)] = 10.0 * std::cos(0.7 * i * i);
    }
    in.G = 0.0;
    const auto r0 = brute_force_residual(in);
    in.G = 1.0;
    const auto r1 = brute_force_residual(in);
    in.G = 3.0;
    const auto r3 = brute_force_residual(in);
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < r0.size(); ++k) {
        diff = std::max(diff, std::abs((r3[k] - r0[k]) - 3.0 * (r1[k] - r0[k])));
        scale = std::max(scale, std::abs(r3[k] - r0[k]));
    }
    EXPECT_GT(scale, 0.0);
    EXPECT_LE(diff, 1e-10 * scale);
}
