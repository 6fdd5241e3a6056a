// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file verify.hpp
/// \brief Independent reference computations: closed-form column limits, horizon
/// quadrature of the stabilization energies and a direct double-loop residual.
///
/// Nothing here calls into the kernel, balance or solver code; only plain Eigen types
/// and hand-written loops are used.

#ifndef PERIPORE_VERIFY_HPP
#define PERIPORE_VERIFY_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace peripore::oracle {

/// Drained settlement of a laterally confined column: f0 L / (K + 4 mu / 3).
inline double oedometric_settlement(double f0, double L, double K, double mu) {
    return f0 * L / (K + 4.0 * mu / 3.0);
}

/// Instantaneous pore pressure under a step load on a confined column.
inline double undrained_pressure(double f0, double phi, double Kw, double K, double mu) {
    const double s = Kw / phi;
    return f0 * s / (s + K + 4.0 * mu / 3.0);
}

enum class EnergyKind { Solid, Fluid };

/// Ratio of the horizon-integrated micro energy to the classical energy density for an
/// isotropic extension (solid, field u = e x) or a linear pressure p = g (1 . x) (fluid).
/// The horizon is split into `resolution` radial cells; in 2D/3D each radial cell is
/// further split into angular cells and the integrand is taken at cell midpoints.
/// `constant` is C (solid) or K_p (fluid); `classical` is the matching classical energy
/// density per unit squared load (2 (K + mu/3) etc. are supplied by the caller).
inline double energy_equivalence_quadrature(EnergyKind kind, int dim, double constant,
                                            double delta, int resolution, double classical) {
    constexpr double pi = std::numbers::pi;
    const int n = resolution;
    const double h = delta / n;
    // Micro energy density w = c f(xi)^2 / (2 |xi|) with f = e|xi| (solid) or g (1 . xi) (fluid).
    auto integrand = [&](const Eigen::Vector3d& xi) {
        const double r = xi.norm();
        double f = 0.0;
        if (kind == EnergyKind::Solid) f = r;
        else for (int a = 0; a < dim; ++a) f += xi[a];
        return constant * f * f / (2.0 * r);
    };
    double W = 0.0;
    for (int k = 0; k < n; ++k) {
        const double r0 = k * h, r1 = (k + 1) * h, rm = 0.5 * (r0 + r1);
        if (dim == 1) {
            W += h * (integrand(Eigen::Vector3d(rm, 0, 0)) + integrand(Eigen::Vector3d(-rm, 0, 0)));
        } else if (dim == 2) {
            const int na = 8 * n;
            const double dth = 2.0 * pi / na;
            const double area = 0.5 * (r1 * r1 - r0 * r0) * dth;
            for (int t = 0; t < na; ++t) {
                const double th = (t + 0.5) * dth;
                W += area * integrand(Eigen::Vector3d(rm * std::cos(th), rm * std::sin(th), 0));
            }
        } else {
            const int nt = 4 * n, np = 8 * n;
            const double dth = pi / nt, dph = 2.0 * pi / np;
            const double rad = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
            for (int t = 0; t < nt; ++t) {
                const double t0 = t * dth, t1 = (t + 1) * dth, tm = 0.5 * (t0 + t1);
                const double vol = rad * (std::cos(t0) - std::cos(t1)) * dph;
                for (int q = 0; q < np; ++q) {
                    const double ph = (q + 0.5) * dph;
                    W += vol * integrand(Eigen::Vector3d(rm * std::sin(tm) * std::cos(ph),
                                                         rm * std::sin(tm) * std::sin(ph),
                                                         rm * std::cos(tm)));
                }
            }
        }
    }
    return 0.5 * W / classical;
}

/// Classical energy densities per unit squared load matching energy_equivalence_quadrature.
inline double classical_solid_energy(int dim, double K, double mu) {
    switch (dim) {
        case 1: return 0.5 * (K + 4.0 * mu / 3.0);
        case 2: return 2.0 * (K + mu / 3.0);
        default: return 4.5 * K;
    }
}
inline double classical_fluid_energy(int dim, double k) { return 0.5 * k * dim; }

/// Inputs of the direct residual evaluation. Vectors are stored with three components;
/// only the first `dim` are used. Density is in the momentum-balance unit (Mg/m^3).
struct BruteForceInput {
    int dim = 1;
    double delta = 0.0;
    std::vector<Eigen::Vector3d> x;
    std::vector<double> volume;
    double K = 0.0, mu = 0.0;
    Eigen::Matrix3d prestress = Eigen::Matrix3d::Zero();
    double k_w = 0.0, K_w = 1.0, phi = 0.0, rho = 0.0;
    double G = 0.0, C = 0.0, Kp = 0.0;
    bool storage = true;
    Eigen::Vector3d gravity = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> u, v, a, body;
    std::vector<double> p, pdot;
};

/// Residual per point [r^u_0 .. r^u_{dim-1}, r^p] from the bond-pair sums written out
/// directly, unit influence function, dissipative sign on the fluid stabilization.
inline std::vector<double> brute_force_residual(const BruteForceInput& in) {
    using Mx = Eigen::MatrixXd;
    using Vx = Eigen::VectorXd;
    const int d = in.dim;
    const std::size_t N = in.x.size();
    const double cut2 = std::pow(in.delta * (1.0 + 1e-10), 2);

    std::vector<std::vector<std::size_t>> nb(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            const double r2 = (in.x[j] - in.x[i]).head(d).squaredNorm();
            if (r2 <= cut2) nb[i].push_back(j);
        }

    auto xi = [&](std::size_t i, std::size_t j) -> Vx { return (in.x[j] - in.x[i]).head(d); };

    std::vector<Mx> Kinv(N), F(N), P(N);
    std::vector<Vx> gp(N), q(N);
    std::vector<double> w0(N);
    for (std::size_t i = 0; i < N; ++i) {
        Mx K = Mx::Zero(d, d), Nm = Mx::Zero(d, d);
        Vx g = Vx::Zero(d);
        w0[i] = 0.0;
        for (std::size_t j : nb[i]) {
            const Vx e = xi(i, j);
            const Vx Y = e + (in.u[j] - in.u[i]).head(d);
            K += in.volume[j] * e * e.transpose();
            Nm += in.volume[j] * Y * e.transpose();
            g += in.volume[j] * (in.p[j] - in.p[i]) * e;
            w0[i] += in.volume[j];
        }
        Kinv[i] = K.inverse();
        F[i] = Nm * Kinv[i];
        gp[i] = Kinv[i] * g;
        q[i] = -in.k_w * gp[i];

        Eigen::Matrix3d eps = Eigen::Matrix3d::Zero();
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                eps(a, b) = 0.5 * (F[i](a, b) + F[i](b, a)) - (a == b ? 1.0 : 0.0);
        const double tr = eps.trace();
        Eigen::Matrix3d sig = in.prestress;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                sig(a, b) += 2.0 * in.mu * (eps(a, b) - (a == b ? tr / 3.0 : 0.0)) +
                             (a == b ? in.K * tr : 0.0);
        Mx s = sig.topLeftCorner(d, d);
        s -= in.p[i] * Mx::Identity(d, d);
        const double J = F[i].determinant();
        P[i] = J * s * F[i].inverse().transpose();
    }

    std::vector<double> r(N * std::size_t(d + 1), 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        Vx T = Vx::Zero(d), Ts = Vx::Zero(d);
        double Vdot = 0.0, Q = 0.0, Qs = 0.0;
        for (std::size_t j : nb[i]) {
            const Vx eij = xi(i, j), eji = xi(j, i);
            T += (P[i] * Kinv[i] * eij - P[j] * Kinv[j] * eji) * in.volume[j];
            Q += (q[i].dot(Kinv[i] * eij) - q[j].dot(Kinv[j] * eji)) * in.volume[j];
            Vdot += (in.v[j] - in.v[i]).head(d).dot(Kinv[i] * eij) * in.volume[j];
            const Vx Rij = (in.u[j] - in.u[i]).head(d) - (F[i] - Mx::Identity(d, d)) * eij;
            const Vx Rji = (in.u[i] - in.u[j]).head(d) - (F[j] - Mx::Identity(d, d)) * eji;
            Ts += (in.G * in.C / w0[i] * Rij - in.G * in.C / w0[j] * Rji) * in.volume[j];
            const double Wij = in.p[j] - in.p[i] - gp[i].dot(eij);
            const double Wji = in.p[i] - in.p[j] - gp[j].dot(eji);
            Qs -= (in.G * in.Kp / w0[i] * Wij - in.G * in.Kp / w0[j] * Wji) * in.volume[j];
        }
        for (int c = 0; c < d; ++c)
            r[i * std::size_t(d + 1) + std::size_t(c)] =
                in.rho * (in.a[i][c] - in.gravity[c]) - T[c] - Ts[c] - in.body[i][c];
        double rp = Vdot + Q + Qs;
        if (in.storage) rp += in.phi / in.K_w * in.pdot[i];
        r[i * std::size_t(d + 1) + std::size_t(d)] = rp;
    }
    return r;
}

}  // namespace peripore::oracle

#endif  // PERIPORE_VERIFY_HPP
