// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file constitutive.hpp
/// \brief Small-strain elasticity, modified Cam-Clay return mapping, Darcy flux and the
/// energy-equivalent stabilization constants.
///
/// Sign convention: solid stress and strain are tension positive, pore pressure is
/// compression positive. Strains of 1D/2D problems are embedded in 3x3 tensors with the
/// suppressed components held at zero (uniaxial strain / plane strain).

#ifndef PERIPORE_CONSTITUTIVE_HPP
#define PERIPORE_CONSTITUTIVE_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "peripore/core.hpp"

namespace peripore {

struct ElasticParams {
    double bulk = 0.0;   ///< K^e [kPa]
    double shear = 0.0;  ///< mu^e [kPa]

    double oedometric() const { return bulk + 4.0 * shear / 3.0; }
    void validate() const {
        if (!(bulk > 0.0)) throw ConfigError("bulk modulus must be positive");
        if (!(shear > 0.0)) throw ConfigError("shear modulus must be positive");
    }
};

struct CamClayParams {
    double M = 1.0;
    double lambda = 0.1;  ///< compression index
    double kappa = 0.03;  ///< swelling index
    double pc0 = -250.0;  ///< initial preconsolidation [kPa], negative in compression

    void validate() const {
        if (!(M > 0.0)) throw ConfigError("critical state slope M must be positive");
        if (!(kappa > 0.0 && lambda > kappa))
            throw ConfigError("Cam-Clay indices must satisfy lambda > kappa > 0");
        if (!(pc0 < 0.0)) throw ConfigError("initial preconsolidation pressure must be negative");
    }
};

struct FlowParams {
    double conductivity = 0.0;   ///< k_w [m/s]
    double fluid_bulk = 0.0;     ///< K_w [kPa]
    double fluid_density = 0.0;  ///< rho_w [kg/m^3]

    void validate() const {
        if (!(conductivity > 0.0)) throw ConfigError("hydraulic conductivity must be positive");
        if (!(fluid_bulk > 0.0)) throw ConfigError("fluid bulk modulus must be positive");
        if (!(fluid_density > 0.0)) throw ConfigError("fluid density must be positive");
    }
};

struct ConstitutiveState {
    Mat3 stress = Mat3::Zero();          ///< effective Cauchy stress [kPa]
    Mat3 plastic_strain = Mat3::Zero();
    Mat3 strain = Mat3::Zero();          ///< total strain at which `stress` was computed
    double pc = 0.0;                     ///< preconsolidation pressure [kPa]
};

inline Tensor4 identity4_sym() {
    Tensor4 I = Tensor4::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            I(tensor_index(i, j), tensor_index(i, j)) += 0.5;
            I(tensor_index(i, j), tensor_index(j, i)) += 0.5;
        }
    return I;
}

inline Eigen::Matrix<double, 9, 1> flatten(const Mat3& A) {
    Eigen::Matrix<double, 9, 1> v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(tensor_index(i, j)) = A(i, j);
    return v;
}

inline Mat3 unflatten(const Eigen::Matrix<double, 9, 1>& v) {
    Mat3 A;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = v(tensor_index(i, j));
    return A;
}

inline Mat3 contract(const Tensor4& C, const Mat3& e) { return unflatten(C * flatten(e)); }

inline Mat3 deviator(const Mat3& A) { return A - A.trace() / 3.0 * Mat3::Identity(); }
inline double mean_stress(const Mat3& s) { return s.trace() / 3.0; }
inline double deviatoric_q(const Mat3& s) { return std::sqrt(1.5) * deviator(s).norm(); }

template <int D>
Mat3 embed(const Mat<D>& A) {
    Mat3 out = Mat3::Zero();
    out.template topLeftCorner<D, D>() = A;
    return out;
}

/// eps = sym(F) - I, embedded in 3x3.
template <int D>
Mat3 strain_from_F(const Mat<D>& F) {
    const Mat<D> e = 0.5 * (F + F.transpose()) - Mat<D>::Identity();
    return embed<D>(e);
}

inline Mat3 elastic_stress(const Mat3& eps, const ElasticParams& p) {
    return p.bulk * eps.trace() * Mat3::Identity() + 2.0 * p.shear * deviator(eps);
}

inline Tensor4 elastic_tangent(const ElasticParams& p) {
    Tensor4 C = 2.0 * p.shear * identity4_sym();
    const double lam = p.bulk - 2.0 * p.shear / 3.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) C(tensor_index(i, i), tensor_index(k, k)) += lam;
    return C;
}

/// f = (p - pc) p + (q / M)^2.
inline double yield_function(double p, double q, double pc, double M) {
    return (p - pc) * p + (q / M) * (q / M);
}

struct ReturnMapResult {
    ConstitutiveState state;
    Tensor4 tangent = Tensor4::Zero();  ///< d sigma / d eps (algorithmic)
    bool plastic = false;
    int iterations = 0;
    double delta_gamma = 0.0;
};

inline constexpr int kReturnMapMaxIterations = 50;

/// Backward-Euler return in (p, q) space with associative flow and hardening
/// pc = pc_n / (1 + d eps_v^p / (lambda - kappa)).
inline ReturnMapResult camclay_return_map(const Mat3& strain, const ConstitutiveState& committed,
                                          const ElasticParams& ep, const CamClayParams& cp,
                                          Index point = 0) {
    const double K = ep.bulk, mu = ep.shear, M2 = cp.M * cp.M;
    const double hk = cp.lambda - cp.kappa;
    const double tol_f = 1e-8 * cp.pc0 * cp.pc0;

    ReturnMapResult out;
    const Mat3 sig_tr = committed.stress + elastic_stress(strain - committed.strain, ep);
    const double p_tr = mean_stress(sig_tr);
    const Mat3 s_tr = deviator(sig_tr);
    const double s_norm = s_tr.norm();
    const double q_tr = std::sqrt(1.5) * s_norm;
    const double pcn = committed.pc;

    out.state.strain = strain;
    if (yield_function(p_tr, q_tr, pcn, cp.M) <= 0.0) {
        out.state.stress = sig_tr;
        out.state.plastic_strain = committed.plastic_strain;
        out.state.pc = pcn;
        out.tangent = elastic_tangent(ep);
        return out;
    }

    const double c = 6.0 * mu / M2;
    double p = p_tr, dg = 0.0;
    auto hardening = [&](double pbar, double& pc, double& dpc_dp, double& h) {
        h = (p_tr - pbar) / (K * hk);
        pc = pcn / (1.0 + h);
        dpc_dp = pc / ((1.0 + h) * K * hk);
    };

    double pc = pcn, pc_p = 0.0, h = 0.0, q = q_tr;
    bool converged = false;
    int it = 0;
    for (; it < kReturnMapMaxIterations; ++it) {
        hardening(p, pc, pc_p, h);
        q = q_tr / (1.0 + c * dg);
        const double r1 = (p_tr - p) / K - dg * (2.0 * p - pc);
        const double r2 = yield_function(p, q, pc, cp.M);
        const double j11 = -1.0 / K - dg * (2.0 - pc_p);
        const double j12 = -(2.0 * p - pc);
        const double j21 = 2.0 * p - pc - p * pc_p;
        const double j22 = (2.0 * q / M2) * (-c * q / (1.0 + c * dg));
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0) break;
        double dp = (-r1 * j22 + r2 * j12) / det;
        double ddg = (-r2 * j11 + r1 * j21) / det;
        if (it > 0 && std::abs(r2) <= 1e-3 * tol_f && std::abs(dp) <= 1e-14 * std::abs(pcn) &&
            std::abs(r1 * K) <= 1e-12 * std::abs(pcn)) {
            converged = true;
            break;
        }
        double scale = 1.0;
        for (int k = 0; k < 40; ++k) {
            const double pn = p + scale * dp, gn = dg + scale * ddg;
            if (gn >= 0.0 && 1.0 + (p_tr - pn) / (K * hk) > 0.0) break;
            scale *= 0.5;
        }
        p += scale * dp;
        dg += scale * ddg;
    }
    hardening(p, pc, pc_p, h);
    q = q_tr / (1.0 + c * dg);
    const double f_final = yield_function(p, q, pc, cp.M);
    if (!converged && !(std::abs(f_final) <= tol_f)) throw ReturnMapFailure(point, p_tr, q_tr, pcn);

    const Mat3 I = Mat3::Identity();
    const Mat3 n = s_norm > 0.0 ? Mat3(s_tr / s_norm) : Mat3(Mat3::Zero());
    out.plastic = true;
    out.iterations = it;
    out.delta_gamma = dg;
    out.state.pc = pc;
    out.state.stress = p * I + std::sqrt(2.0 / 3.0) * q * n;
    const double deps_v = (p_tr - p) / K;
    const Mat3 deps_p = deps_v / 3.0 * I + dg * (2.0 * q / M2) * std::sqrt(1.5) * n;
    out.state.plastic_strain = committed.plastic_strain + deps_p;

    // Implicit differentiation of (r1, r2) = 0 with respect to (p_tr, q_tr).
    const double j11 = -1.0 / K - dg * (2.0 - pc_p);
    const double j12 = -(2.0 * p - pc);
    const double j21 = 2.0 * p - pc - p * pc_p;
    const double dq_ddg = -c * q / (1.0 + c * dg);
    const double j22 = (2.0 * q / M2) * dq_ddg;
    const double b11 = 1.0 / K - dg * pc_p, b12 = 0.0;
    const double b21 = p * pc_p, b22 = (2.0 * q / M2) / (1.0 + c * dg);
    const double det = j11 * j22 - j12 * j21;
    // dz = -J^-1 B dparam
    const double dp_dptr = -(j22 * b11 - j12 * b21) / det;
    const double dp_dqtr = -(j22 * b12 - j12 * b22) / det;
    const double dg_dptr = -(-j21 * b11 + j11 * b21) / det;
    const double dg_dqtr = -(-j21 * b12 + j11 * b22) / det;
    const double a11 = dp_dptr, a12 = dp_dqtr;
    const double a21 = dq_ddg * dg_dptr;
    const double a22 = dq_ddg * dg_dqtr + 1.0 / (1.0 + c * dg);

    const auto fI = flatten(I);
    const auto fn = flatten(n);
    const double r6 = std::sqrt(6.0) * mu;
    const double ratio = 1.0 / (1.0 + c * dg);  // q / q_tr
    Tensor4 Idev = identity4_sym();
    Idev -= fI * fI.transpose() / 3.0;
    out.tangent = fI * (a11 * K * fI + a12 * r6 * fn).transpose() +
                  std::sqrt(2.0 / 3.0) * fn * (a21 * K * fI + a22 * r6 * fn).transpose() +
                  2.0 * mu * ratio * (Idev - fn * fn.transpose());
    return out;
}

struct SolidModel {
    enum class Kind { Elastic, CamClay };
    Kind kind = Kind::Elastic;
    ElasticParams elastic;
    CamClayParams camclay;
    Tensor4 elastic_C = Tensor4::Zero();  ///< cached by prepare()
    bool prepared = false;

    void validate() const {
        elastic.validate();
        if (kind == Kind::CamClay) camclay.validate();
    }

    void prepare() {
        elastic_C = elastic_tangent(elastic);
        prepared = true;
    }

    ReturnMapResult update(const Mat3& strain, const ConstitutiveState& committed,
                           Index point = 0) const {
        if (kind == Kind::CamClay) return camclay_return_map(strain, committed, elastic, camclay, point);
        ReturnMapResult r;
        r.state = committed;
        r.state.strain = strain;
        r.state.stress = committed.stress + elastic_stress(strain - committed.strain, elastic);
        r.tangent = prepared ? elastic_C : elastic_tangent(elastic);
        return r;
    }
};

/// q_w = -k_w grad p.
template <typename V>
V darcy_flux(const V& grad_p, double k_w) {
    return -k_w * grad_p;
}

/// Solid micromodulus C matching the classical strain energy of an isotropic extension.
/// 3D: 18 K / (pi d^4); plane strain: 12 (K + mu/3) / (pi d^3); 1D: 2 M_oed / d^2.
inline double micromodulus(const ElasticParams& p, double delta, int dim) {
    constexpr double pi = std::numbers::pi;
    switch (dim) {
        case 1: return 2.0 * p.oedometric() / (delta * delta);
        case 2: return 12.0 * (p.bulk + p.shear / 3.0) / (pi * std::pow(delta, 3));
        case 3: return 18.0 * p.bulk / (pi * std::pow(delta, 4));
        default: throw ConfigError("dimension must be 1, 2 or 3");
    }
}

/// Hydraulic micro-conductivity K_p matching the classical dissipation of a linear
/// pressure field. 3D: 6 k / (pi d^4); 2D: 6 k / (pi d^3); 1D: 2 k / d^2.
inline double micro_conductivity(double k_w, double delta, int dim) {
    constexpr double pi = std::numbers::pi;
    switch (dim) {
        case 1: return 2.0 * k_w / (delta * delta);
        case 2: return 6.0 * k_w / (pi * std::pow(delta, 3));
        case 3: return 6.0 * k_w / (pi * std::pow(delta, 4));
        default: throw ConfigError("dimension must be 1, 2 or 3");
    }
}

inline double mixture_density(double phi, double rho_s, double rho_w) {
    if (!(phi >= 0.0 && phi <= 1.0))
        throw ConfigError("porosity " + std::to_string(phi) + " outside [0, 1]");
    return rho_s * (1.0 - phi) + rho_w * phi;
}

}  // namespace peripore

#endif  // PERIPORE_CONSTITUTIVE_HPP
