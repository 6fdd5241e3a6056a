// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file nonlocal_states.hpp
/// \brief Correspondence kernels: shape tensors, nonlocal gradients and non-uniform bond states.

#ifndef PERIPORE_NONLOCAL_STATES_HPP
#define PERIPORE_NONLOCAL_STATES_HPP

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "peripore/core.hpp"
#include "peripore/discretization.hpp"

namespace peripore {

struct InfluenceFunction {
    enum class Kind { Unit, InverseBondLength };
    Kind kind = Kind::Unit;
    double horizon = 1.0;

    double operator()(double r) const {
        return kind == Kind::Unit ? 1.0 : horizon / r;
    }
};

inline constexpr double kShapeTensorRcondLimit = 1e-10;

/// K = sum_j w(|xi|) xi (x) xi V_j. Throws SingularShapeTensor when rcond(K) < 1e-10.
template <int D>
Mat<D> shape_tensor(std::span<const Bond<D>> family, const InfluenceFunction& w, Index owner = 0) {
    Mat<D> K = Mat<D>::Zero();
    for (const auto& b : family) K.noalias() += w(b.xi.norm()) * b.volume * b.xi * b.xi.transpose();
    if (family.empty()) throw SingularShapeTensor(owner, 0.0);
    Eigen::SelfAdjointEigenSolver<Mat<D>> es(K, Eigen::EigenvaluesOnly);
    const auto ev = es.eigenvalues();
    const double rc = ev.maxCoeff() > 0.0 ? ev.minCoeff() / ev.maxCoeff() : 0.0;
    if (!(rc >= kShapeTensorRcondLimit)) throw SingularShapeTensor(owner, rc);
    return K;
}

template <int D>
double weighted_volume(std::span<const Bond<D>> family, const InfluenceFunction& w) {
    double s = 0.0;
    for (const auto& b : family) s += w(b.xi.norm()) * b.volume;
    return s;
}

template <int D>
struct DeformationGradient {
    Mat<D> F;
    double J;
};

/// F = (sum_j w Y (x) xi V_j) K^-1 with Y = xi + u_j - u_i.
template <int D>
DeformationGradient<D> nonlocal_deformation_gradient(std::span<const Bond<D>> family, Index owner,
                                                     std::span<const Vec<D>> u,
                                                     const Mat<D>& K_inv,
                                                     const InfluenceFunction& w) {
    Mat<D> N = Mat<D>::Zero();
    for (const auto& b : family) {
        const Vec<D> Y = b.xi + u[b.j] - u[owner];
        N.noalias() += w(b.xi.norm()) * b.volume * Y * b.xi.transpose();
    }
    DeformationGradient<D> out{N * K_inv, 0.0};
    out.J = out.F.determinant();
    if (!(out.J > 0.0)) throw InvertedElement(owner, out.J);
    return out;
}

/// grad p = K^-1 sum_j w (p_j - p_i) xi V_j.
template <int D>
Vec<D> nonlocal_pressure_gradient(std::span<const Bond<D>> family, Index owner,
                                  std::span<const double> p, const Mat<D>& K_inv,
                                  const InfluenceFunction& w) {
    Vec<D> s = Vec<D>::Zero();
    for (const auto& b : family) s += w(b.xi.norm()) * b.volume * (p[b.j] - p[owner]) * b.xi;
    return K_inv * s;
}

template <int D>
struct NonUniformStates {
    std::vector<Vec<D>> solid;  ///< R^s per bond [m]
    std::vector<double> fluid;  ///< R^w per bond [kPa]
};

template <int D>
NonUniformStates<D> nonuniform_states(std::span<const Bond<D>> family, Index owner,
                                      std::span<const Vec<D>> u, std::span<const double> p,
                                      const Mat<D>& F, const Vec<D>& grad_p) {
    NonUniformStates<D> s;
    s.solid.reserve(family.size());
    s.fluid.reserve(family.size());
    for (const auto& b : family) {
        const Vec<D> Y = b.xi + u[b.j] - u[owner];
        s.solid.push_back(Y - F * b.xi);
        s.fluid.push_back(p[b.j] - p[owner] - grad_p.dot(b.xi));
    }
    return s;
}

/// Per-point shape tensors and the bond gradient weights B_ij = w V_j K_i^-1 xi_ij.
template <int D>
struct KernelTable {
    std::vector<Mat<D>> K;
    std::vector<Mat<D>> K_inv;
    std::vector<double> omega0;
    std::vector<double> weight;  ///< w(|xi|) per bond
    std::vector<Vec<D>> B;       ///< per bond, aligned with Families::bonds
    std::vector<Vec<D>> B_self;  ///< B_ii = -sum_j B_ij

    /// F_i = I + sum_j (u_j - u_i) (x) B_ij.
    Mat<D> deformation_gradient(const Families<D>& fam, Index i, std::span<const Vec<D>> u) const {
        Mat<D> F = Mat<D>::Identity();
        for (Index b = fam.begin(i); b < fam.end(i); ++b)
            F.noalias() += (u[fam.bonds[b].j] - u[i]) * B[b].transpose();
        return F;
    }

    Vec<D> pressure_gradient(const Families<D>& fam, Index i, std::span<const double> p) const {
        Vec<D> g = Vec<D>::Zero();
        for (Index b = fam.begin(i); b < fam.end(i); ++b) g += (p[fam.bonds[b].j] - p[i]) * B[b];
        return g;
    }
};

template <int D>
KernelTable<D> build_kernels(const Families<D>& fam, const InfluenceFunction& w) {
    const Index N = fam.size();
    KernelTable<D> kt;
    kt.K.resize(N);
    kt.K_inv.resize(N);
    kt.omega0.resize(N);
    kt.weight.resize(fam.bonds.size());
    kt.B.resize(fam.bonds.size());
    kt.B_self.resize(N);
    for (Index i = 0; i < N; ++i) {
        const auto f = fam.of(i);
        kt.K[i] = shape_tensor<D>(f, w, i);
        kt.K_inv[i] = kt.K[i].inverse();
        kt.omega0[i] = weighted_volume<D>(f, w);
        Vec<D> self = Vec<D>::Zero();
        for (Index b = fam.begin(i); b < fam.end(i); ++b) {
            const auto& bd = fam.bonds[b];
            kt.weight[b] = w(bd.xi.norm());
            kt.B[b] = kt.weight[b] * bd.volume * (kt.K_inv[i] * bd.xi);
            self -= kt.B[b];
        }
        kt.B_self[i] = self;
    }
    return kt;
}

}  // namespace peripore

#endif  // PERIPORE_NONLOCAL_STATES_HPP
