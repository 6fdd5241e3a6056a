// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "peripore/constitutive.hpp"

using namespace peripore;

namespace {

const ElasticParams kLoc{2.5e4, 1.154e4};
const CamClayParams kCC{1.0, 0.10, 0.03, -250.0};

ConstitutiveState isotropic(double p, double pc) {
    ConstitutiveState s;
    s.stress = p * Mat3::Identity();
    s.pc = pc;
    return s;
}

Mat3 random_sym(std::mt19937& rng, double scale) {
    std::normal_distribution<double> N(0.0, scale);
    Mat3 A;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = N(rng);
    return 0.5 * (A + A.transpose());
}

/// Forward-Euler integration of the continuum elastoplastic rate equations.
struct ExplicitCamClay {
    Mat3 sig;
    double pc;
    Mat3 ep = Mat3::Zero();

    void step(const Mat3& de) {
        const double K = kLoc.bulk, mu = kLoc.shear, M2 = kCC.M * kCC.M, hk = kCC.lambda - kCC.kappa;
        const Mat3 dsig_e = K * de.trace() * Mat3::Identity() + 2 * mu * (de - de.trace() / 3 * Mat3::Identity());
        const Mat3 trial = sig + dsig_e;
        const double p = sig.trace() / 3;
        const Mat3 s = sig - p * Mat3::Identity();
        const double q = std::sqrt(1.5) * s.norm();
        auto f = [&](const Mat3& S) {
            const double pp = S.trace() / 3;
            const double qq = std::sqrt(1.5) * (S - pp * Mat3::Identity()).norm();
            return (pp - pc) * pp + qq * qq / M2;
        };
        if (f(trial) <= 0.0) {
            sig = trial;
            return;
        }
        const Mat3 m = (2 * p - pc) / 3 * Mat3::Identity() + 3.0 / M2 * s;
        const Mat3 Cm = K * m.trace() * Mat3::Identity() + 2 * mu * (m - m.trace() / 3 * Mat3::Identity());
        const double mCde = (m.array() * dsig_e.array()).sum();
        const double mCm = (m.array() * Cm.array()).sum();
        const double hard = -p * pc * (2 * p - pc) / hk;
        const double dg = mCde / (mCm + hard);
        if (dg <= 0.0) {
            sig = trial;
            return;
        }
        sig = trial - dg * Cm;
        ep += dg * m;
        pc += -pc / hk * dg * (2 * p - pc);
        (void)q;
    }
};

}  // namespace

TEST(Strain, SmallStrainMeasure) {
    EXPECT_LE(strain_from_F<3>(Mat3::Identity()).norm(), 0.0);
    const double a = 0.01;
    EXPECT_LE((strain_from_F<3>((1 + a) * Mat3::Identity()) - a * Mat3::Identity()).norm(), 1e-16);
    Mat3 F = Mat3::Identity();
    F(0, 1) = 0.02;
    const Mat3 e = strain_from_F<3>(F);
    EXPECT_DOUBLE_EQ(e(0, 1), 0.01);
    EXPECT_DOUBLE_EQ(e(1, 0), 0.01);
    Mat<2> F2 = Mat<2>::Identity() * 1.01;
    const Mat3 e2 = strain_from_F<2>(F2);
    EXPECT_DOUBLE_EQ(e2(2, 2), 0.0);
    EXPECT_NEAR(e2(0, 0), 0.01, 1e-15);
}

TEST(Elastic, StressCases) {
    const ElasticParams p{2.1e5, 9.8e4};
    EXPECT_LE(elastic_stress(Mat3::Zero(), p).norm(), 0.0);
    const double ev = 1e-4;
    EXPECT_LE((elastic_stress(ev / 3 * Mat3::Identity(), p) - p.bulk * ev * Mat3::Identity()).norm(), 1e-10);
    Mat3 e = Mat3::Zero();
    e(0, 1) = e(1, 0) = 0.5e-3;
    EXPECT_NEAR(elastic_stress(e, p)(0, 1), p.shear * 1e-3, 1e-9);
}

TEST(Elastic, TangentMatchesStressExactly) {
    const ElasticParams p{2.1e5, 9.8e4};
    std::mt19937 rng(2);
    const Tensor4 C = elastic_tangent(p);
    for (int k = 0; k < 10; ++k) {
        const Mat3 e = random_sym(rng, 1e-3);
        EXPECT_LE((contract(C, e) - elastic_stress(e, p)).norm(), 1e-9);
    }
}

TEST(CamClay, YieldFunctionValues) {
    EXPECT_DOUBLE_EQ(yield_function(-125, 0, -250, 1.0), -15625.0);
    EXPECT_DOUBLE_EQ(yield_function(-250, 0, -250, 1.0), 0.0);
    EXPECT_NEAR(yield_function(-125, 1.0 * 125, -250, 1.0), 0.0, 1e-12);
}

TEST(CamClay, ElasticInteriorStep) {
    const auto s = isotropic(-100, -250);
    Mat3 e = Mat3::Zero();
    e(0, 0) = -1e-4;
    const auto r = camclay_return_map(e, s, kLoc, kCC);
    EXPECT_FALSE(r.plastic);
    EXPECT_LE((r.tangent - elastic_tangent(kLoc)).norm(), 0.0);
    EXPECT_DOUBLE_EQ(r.state.pc, -250.0);
}

TEST(CamClay, PlasticReturnSatisfiesYieldAndNormality) {
    const auto s = isotropic(-100, -250);
    std::mt19937 rng(8);
    for (int k = 0; k < 50; ++k) {
        const Mat3 e = random_sym(rng, 6e-3);
        const auto r = camclay_return_map(e, s, kLoc, kCC);
        const double p = mean_stress(r.state.stress), q = deviatoric_q(r.state.stress);
        if (!r.plastic) continue;
        EXPECT_LE(std::abs(yield_function(p, q, r.state.pc, kCC.M)), 1e-8 * kCC.pc0 * kCC.pc0);
        // Plastic strain increment parallel to df/dsigma.
        const Mat3 dep = r.state.plastic_strain;
        const Mat3 dev = deviator(r.state.stress);
        const Mat3 m = (2 * p - r.state.pc) / 3 * Mat3::Identity() + 3.0 / (kCC.M * kCC.M) * dev;
        const double cosang = (dep.array() * m.array()).sum() / (dep.norm() * m.norm());
        EXPECT_NEAR(cosang, 1.0, 1e-8);
        EXPECT_LE(r.state.pc, 0.0);
    }
}

TEST(CamClay, AlgorithmicTangentMatchesFiniteDifferences) {
    std::mt19937 rng(13);
    int checked = 0;
    for (int k = 0; k < 40; ++k) {
        auto s = isotropic(-100, -250);
        s.stress += random_sym(rng, 10.0);
        const Mat3 e = random_sym(rng, 4e-3);
        const auto r = camclay_return_map(e, s, kLoc, kCC);
        if (!r.plastic || r.delta_gamma < 1e-9) continue;
        const Mat3 dir = random_sym(rng, 1.0);
        const double h = 1e-7;
        const auto rp = camclay_return_map(e + h * dir, s, kLoc, kCC);
        const auto rm = camclay_return_map(e - h * dir, s, kLoc, kCC);
        if (!rp.plastic || !rm.plastic) continue;
        const Mat3 fd = (rp.state.stress - rm.state.stress) / (2 * h);
        const Mat3 an = contract(r.tangent, dir);
        EXPECT_LE((fd - an).norm() / an.norm(), 1e-5);
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(CamClay, ApexReturnStaysHydrostatic) {
    const auto s = isotropic(-240, -250);
    const Mat3 e = -3e-3 * Mat3::Identity();
    const auto r = camclay_return_map(e, s, kLoc, kCC);
    EXPECT_TRUE(r.plastic);
    EXPECT_LE(deviatoric_q(r.state.stress), 1e-9);
    EXPECT_LT(r.state.pc, -250.0);
    EXPECT_LE(std::abs(yield_function(mean_stress(r.state.stress), 0, r.state.pc, kCC.M)), 1e-8 * 250 * 250);
}

TEST(CamClay, HardeningFollowsPlasticVolumeChange) {
    // Compaction hardens (pc more negative), dilation softens.
    auto s = isotropic(-200, -250);
    Mat3 e = Mat3::Zero();
    e(0, 0) = -4e-3;
    auto r = camclay_return_map(e, s, kLoc, kCC);
    ASSERT_TRUE(r.plastic);
    EXPECT_LT(r.state.plastic_strain.trace(), 0.0);
    EXPECT_LT(r.state.pc, -250.0);

    s = isotropic(-60, -250);
    e = Mat3::Zero();
    e(0, 1) = e(1, 0) = 4e-3;
    r = camclay_return_map(e, s, kLoc, kCC);
    ASSERT_TRUE(r.plastic);
    EXPECT_GT(r.state.plastic_strain.trace(), 0.0);
    EXPECT_GT(r.state.pc, -250.0);
}

TEST(CamClay, CriticalStateFlowLeavesPcUnchanged) {
    ConstitutiveState s = isotropic(-125, -250);
    s.stress(0, 1) = s.stress(1, 0) = 125.0 / std::sqrt(3.0);
    ASSERT_NEAR(yield_function(mean_stress(s.stress), deviatoric_q(s.stress), -250, 1.0), 0.0, 1e-9);
    Mat3 e = Mat3::Zero();
    e(0, 1) = e(1, 0) = 1e-3;
    const auto r = camclay_return_map(e, s, kLoc, kCC);
    EXPECT_TRUE(r.plastic);
    EXPECT_NEAR(r.state.pc, -250.0, 1e-9);
    EXPECT_NEAR(r.state.plastic_strain.trace(), 0.0, 1e-12);
}

TEST(CamClay, AgreesWithExplicitSubsteppingOracle) {
    // Drained triaxial-like path: axial compression with lateral extension, crossing yield.
    Mat3 total = Mat3::Zero();
    total(1, 1) = -1.2e-2;
    total(0, 0) = 2e-3;
    total(2, 2) = 1e-3;
    const int n_impl = 40, n_expl = 10000;

    ConstitutiveState s = isotropic(-100, -250);
    bool crossed = false;
    for (int k = 1; k <= n_impl; ++k) {
        const auto r = camclay_return_map(total * (double(k) / n_impl), s, kLoc, kCC);
        crossed = crossed || r.plastic;
        s = r.state;
    }
    ASSERT_TRUE(crossed);

    ExplicitCamClay ex{-100 * Mat3::Identity(), -250};
    for (int k = 0; k < n_expl; ++k) ex.step(total / n_expl);

    EXPECT_LE((s.stress - ex.sig).norm() / ex.sig.norm(), 5e-3);
    EXPECT_LE(std::abs(s.pc - ex.pc) / std::abs(ex.pc), 5e-3);
}

TEST(Flow, DarcyFlux) {
    EXPECT_LE(darcy_flux(Vec3::Zero().eval(), 1e-3).norm(), 0.0);
    const Vec3 g = Vec3::Constant(2.0);
    EXPECT_LE((darcy_flux(g, 3.55e-5) + 3.55e-5 * g).norm(), 1e-20);
    const Vec<1> gx(5.0);
    EXPECT_LT(darcy_flux(gx, 1e-2)[0], 0.0);
}

TEST(Constants, Micromodulus) {
    const ElasticParams p{2.1e5, 9.8e4};
    EXPECT_NEAR(micromodulus(p, 0.082, 3) / 2.661e10, 1.0, 1e-3);
    EXPECT_NEAR(micromodulus(p, 0.164, 3), micromodulus(p, 0.082, 3) / 16, 1e-6);
    EXPECT_NEAR(micromodulus(p, 0.082, 1), 2 * p.oedometric() / (0.082 * 0.082), 1e-6);
    EXPECT_NEAR(micromodulus(p, 0.082, 2), 12 * (p.bulk + p.shear / 3) / (M_PI * std::pow(0.082, 3)), 1e-3);
}

TEST(Constants, MicroConductivity) {
    EXPECT_NEAR(micro_conductivity(3.55e-5, 0.082, 3), 1.50, 0.005);
    EXPECT_NEAR(micro_conductivity(3.55e-5, 0.164, 3), micro_conductivity(3.55e-5, 0.082, 3) / 16, 1e-12);
    EXPECT_NEAR(micro_conductivity(3.55e-5, 0.082, 1), 2 * 3.55e-5 / (0.082 * 0.082), 1e-15);
}

TEST(Constants, MixtureDensity) {
    EXPECT_DOUBLE_EQ(mixture_density(0.0, 1884, 1000), 1884.0);
    EXPECT_DOUBLE_EQ(mixture_density(1.0, 1884, 1000), 1000.0);
    EXPECT_NEAR(mixture_density(0.48, 1884, 1000), 1459.68, 1e-9);
    EXPECT_THROW(mixture_density(1.2, 1884, 1000), ConfigError);
    EXPECT_THROW(mixture_density(-0.1, 1884, 1000), ConfigError);
}

TEST(Params, Validation) {
    EXPECT_THROW((ElasticParams{-1, 1}.validate()), ConfigError);
    EXPECT_THROW((CamClayParams{1.0, 0.03, 0.1, -250}.validate()), ConfigError);
    EXPECT_THROW((CamClayParams{1.0, 0.1, 0.03, 250}.validate()), ConfigError);
    EXPECT_NO_THROW(kCC.validate());
}
