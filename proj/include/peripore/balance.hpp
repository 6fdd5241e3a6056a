// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file balance.hpp
/// \brief Discrete model and per-point residual densities of the coupled momentum and
/// mass balance.
///
/// Units: stress and pressure in kPa, lengths in m, time in s. Densities are given in
/// kg/m^3 and enter the momentum balance in Mg/m^3 so that rho * a is in kN/m^3.

#ifndef PERIPORE_BALANCE_HPP
#define PERIPORE_BALANCE_HPP

#include <cmath>
#include <span>
#include <vector>

#include "peripore/constitutive.hpp"
#include "peripore/core.hpp"
#include "peripore/discretization.hpp"
#include "peripore/load_protocol.hpp"
#include "peripore/newmark.hpp"
#include "peripore/nonlocal_states.hpp"
#include "peripore/parallel.hpp"

namespace peripore {

inline constexpr double kDensityScale = 1e-3;  ///< kg/m^3 -> Mg/m^3

struct ModelFlags {
    bool storage_term = true;
    bool inertial_flux = false;
    bool porosity_update = false;
    bool geometric_terms = true;  ///< keep J and F^-T in P; false gives P = sigma
};

struct StabilizationParams {
    double G = 0.0;
    double C = 0.0;   ///< micromodulus
    double Kp = 0.0;  ///< micro-conductivity

    void validate() const {
        if (!(G >= 0.0)) throw ConfigError("stabilization gain G must be non-negative");
    }
};

enum class ConstraintKind { Displacement, Velocity, Pressure };

struct DofConstraint {
    Index point = 0;
    int component = 0;  ///< displacement component, or D for the pressure
    ConstraintKind kind = ConstraintKind::Displacement;
    int protocol = -1;  ///< index into Model::protocols, -1 for a zero target
    double scale = 1.0;
};

template <int D>
struct BodyLoad {
    Index point = 0;
    Vec<D> direction = Vec<D>::Zero();  ///< force density per unit protocol value [kN/m^3]
    int protocol = 0;
};

template <int D>
struct Model {
    GridSpec grid;
    std::vector<MaterialPoint<D>> points;
    Families<D> families;
    InfluenceFunction influence;
    KernelTable<D> kernels;

    SolidModel solid;
    FlowParams flow;
    double solid_density = 0.0;  ///< rho_s [kg/m^3]
    double porosity = 0.0;       ///< phi_0
    StabilizationParams stab;
    ModelFlags flags;
    Vec<D> gravity = Vec<D>::Zero();

    std::vector<LoadProtocol> protocols;
    std::vector<BodyLoad<D>> body_loads;
    std::vector<DofConstraint> constraints;
    std::vector<int> constraint_of_dof;  ///< -1 when free

    Index size() const { return points.size(); }
    Index dofs() const { return points.size() * Index(D + 1); }
    double dx() const { return grid.spacing; }

    double beta(Index i, Index bond) const {
        return stab.G * stab.C * kernels.weight[bond] / kernels.omega0[i];
    }
    double lambda(Index i, Index bond) const {
        return stab.G * stab.Kp * kernels.weight[bond] / kernels.omega0[i];
    }

    int add_protocol(const LoadProtocol& p) {
        p.validate();
        protocols.push_back(p);
        return int(protocols.size()) - 1;
    }

    /// Sets (or overrides) the constraint on one DOF.
    void constrain(Index point, int component, ConstraintKind kind, int protocol, double scale = 1.0) {
        if (constraint_of_dof.size() != dofs()) constraint_of_dof.assign(dofs(), -1);
        const Index dof = points[point].dof(component);
        DofConstraint c{point, component, kind, protocol, scale};
        if (constraint_of_dof[dof] >= 0) {
            constraints[Index(constraint_of_dof[dof])] = c;
        } else {
            constraint_of_dof[dof] = int(constraints.size());
            constraints.push_back(c);
        }
    }

    void release(Index point, int component) {
        if (constraint_of_dof.size() != dofs()) return;
        const Index dof = points[point].dof(component);
        const int k = constraint_of_dof[dof];
        if (k < 0) return;
        constraints.erase(constraints.begin() + k);
        constraint_of_dof.assign(dofs(), -1);
        for (Index c = 0; c < constraints.size(); ++c)
            constraint_of_dof[points[constraints[c].point].dof(constraints[c].component)] = int(c);
    }

    bool constrained(Index dof) const {
        return !constraint_of_dof.empty() && constraint_of_dof[dof] >= 0;
    }

    double target(const DofConstraint& c, double t) const {
        return c.protocol < 0 ? 0.0 : c.scale * protocols[Index(c.protocol)].value(t);
    }

    std::vector<Vec<D>> body_forces(double t) const {
        std::vector<Vec<D>> b(size(), Vec<D>::Zero());
        for (const auto& l : body_loads) b[l.point] += l.direction * protocols[Index(l.protocol)].value(t);
        return b;
    }
};

/// Builds families and kernels over given points and derives the stabilization constants.
template <int D>
Model<D> make_model(std::vector<MaterialPoint<D>> points, const GridSpec& grid,
                    const SolidModel& solid, const FlowParams& flow, double solid_density,
                    double porosity, double G, ModelFlags flags = {},
                    InfluenceFunction::Kind influence = InfluenceFunction::Kind::Unit) {
    solid.validate();
    flow.validate();
    if (!(solid_density > 0.0)) throw ConfigError("solid density must be positive");
    mixture_density(porosity, solid_density, flow.fluid_density);
    Model<D> m;
    m.grid = grid;
    m.points = std::move(points);
    for (Index i = 0; i < m.points.size(); ++i)
        if (m.points[i].id != i) throw GridError("point ids must equal their positions");
    const double delta = grid.horizon();
    m.families = build_families<D>(m.points, delta);
    m.influence = InfluenceFunction{influence, delta};
    m.kernels = build_kernels<D>(m.families, m.influence);
    m.solid = solid;
    m.solid.prepare();
    m.flow = flow;
    m.solid_density = solid_density;
    m.porosity = porosity;
    m.flags = flags;
    m.stab.G = G;
    m.stab.validate();
    m.stab.C = micromodulus(solid.elastic, delta, D);
    m.stab.Kp = micro_conductivity(flow.conductivity, delta, D);
    m.constraint_of_dof.assign(m.dofs(), -1);
    return m;
}

/// Lattice model: points from generate_grid(grid).
template <int D>
Model<D> make_model(const GridSpec& grid, const SolidModel& solid, const FlowParams& flow,
                    double solid_density, double porosity, double G, ModelFlags flags = {},
                    InfluenceFunction::Kind influence = InfluenceFunction::Kind::Unit) {
    return make_model<D>(generate_grid<D>(grid), grid, solid, flow, solid_density, porosity, G,
                         flags, influence);
}

/// Correspondence quantities and constitutive response of one point at an iterate.
template <int D>
struct PointEval {
    Mat<D> F = Mat<D>::Identity();
    Mat<D> F_invT = Mat<D>::Identity();
    double J = 1.0;
    Mat<D> Fp_invT = Mat<D>::Identity();  ///< F^-T entering P (identity without geometric terms)
    double Jp = 1.0;
    Vec<D> grad_p = Vec<D>::Zero();
    Mat<D> sigma = Mat<D>::Zero();  ///< total stress (effective minus pore pressure)
    Mat<D> P = Mat<D>::Zero();      ///< J sigma F^-T
    Vec<D> q = Vec<D>::Zero();      ///< flux entering the flow density
    double phi = 0.0;
    double rho = 0.0;  ///< mixture density [Mg/m^3]
    ReturnMapResult response;
};

template <int D>
using Evaluation = std::vector<PointEval<D>>;

template <int D>
Evaluation<D> evaluate(const Model<D>& m, const State<D>& s) {
    Evaluation<D> ev(m.size());
    parallel_for(m.size(), [&](Index i) {
        auto& e = ev[i];
        e.F = m.kernels.deformation_gradient(m.families, i, s.u);
        e.J = e.F.determinant();
        if (!(e.J > 0.0) || !std::isfinite(e.J)) throw InvertedElement(i, e.J);
        e.F_invT = e.F.inverse().transpose();
        e.grad_p = m.kernels.pressure_gradient(m.families, i, s.p);
        e.response = m.solid.update(strain_from_F<D>(e.F), s.history[i], i);
        e.sigma = e.response.state.stress.template topLeftCorner<D, D>() -
                  s.p[i] * Mat<D>::Identity();
        if (m.flags.geometric_terms) {
            e.Jp = e.J;
            e.Fp_invT = e.F_invT;
        }
        e.P = e.Jp * e.sigma * e.Fp_invT;
        e.q = darcy_flux(e.grad_p, m.flow.conductivity);
        if (m.flags.inertial_flux) e.q -= m.flow.conductivity * s.a[i];
        e.phi = m.flags.porosity_update ? 1.0 - (1.0 - m.porosity) / e.J : m.porosity;
        e.rho = kDensityScale * (m.solid_density * (1.0 - e.phi) + m.flow.fluid_density * e.phi);
    });
    return ev;
}

/// T_i = -P_i B_ii - sum_j (V_j / V_i) P_j B_ji.
template <int D>
Vec<D> internal_force_density(const Model<D>& m, const Evaluation<D>& ev, Index i) {
    const auto& fam = m.families;
    Vec<D> t = -(ev[i].P * m.kernels.B_self[i]);
    const double Vi = m.points[i].volume;
    for (Index b = fam.begin(i); b < fam.end(i); ++b) {
        const auto& bd = fam.bonds[b];
        t -= (bd.volume / Vi) * (ev[bd.j].P * m.kernels.B[fam.reverse[b]]);
    }
    return t;
}

/// T^s_i = sum_j [beta_ij R^s_ij - beta_ji R^s_ji] V_j.
template <int D>
Vec<D> stabilization_force_density(const Model<D>& m, const State<D>& s, const Evaluation<D>& ev,
                                   Index i) {
    Vec<D> t = Vec<D>::Zero();
    if (m.stab.G == 0.0) return t;
    const auto& fam = m.families;
    const Mat<D> Ei = ev[i].F - Mat<D>::Identity();
    for (Index b = fam.begin(i); b < fam.end(i); ++b) {
        const auto& bd = fam.bonds[b];
        const Index j = bd.j, rb = fam.reverse[b];
        const Vec<D> du = s.u[j] - s.u[i];
        const Vec<D> Rij = du - Ei * bd.xi;
        const Vec<D> Rji = -du - (ev[j].F - Mat<D>::Identity()) * fam.bonds[rb].xi;
        t += (m.beta(i, b) * Rij - m.beta(j, rb) * Rji) * bd.volume;
    }
    return t;
}

/// dV_i/dt = sum_j (v_j - v_i) . B_ij.
template <int D>
double volume_rate_density(const Model<D>& m, const State<D>& s, Index i) {
    double r = 0.0;
    for (Index b = m.families.begin(i); b < m.families.end(i); ++b)
        r += (s.v[m.families.bonds[b].j] - s.v[i]).dot(m.kernels.B[b]);
    return r;
}

/// Q_i = -q_i . B_ii - sum_j (V_j / V_i) q_j . B_ji.
template <int D>
double flow_density(const Model<D>& m, const Evaluation<D>& ev, Index i) {
    const auto& fam = m.families;
    double r = -ev[i].q.dot(m.kernels.B_self[i]);
    const double Vi = m.points[i].volume;
    for (Index b = fam.begin(i); b < fam.end(i); ++b) {
        const auto& bd = fam.bonds[b];
        r -= (bd.volume / Vi) * ev[bd.j].q.dot(m.kernels.B[fam.reverse[b]]);
    }
    return r;
}

/// Q^s_i = -sum_j [lambda_ij R^w_ij - lambda_ji R^w_ji] V_j (dissipative sign).
template <int D>
double stabilization_flow_density(const Model<D>& m, const State<D>& s, const Evaluation<D>& ev,
                                  Index i) {
    if (m.stab.G == 0.0) return 0.0;
    const auto& fam = m.families;
    double r = 0.0;
    for (Index b = fam.begin(i); b < fam.end(i); ++b) {
        const auto& bd = fam.bonds[b];
        const Index j = bd.j, rb = fam.reverse[b];
        const double dp = s.p[j] - s.p[i];
        const double Rij = dp - ev[i].grad_p.dot(bd.xi);
        const double Rji = -dp - ev[j].grad_p.dot(fam.bonds[rb].xi);
        r -= (m.lambda(i, b) * Rij - m.lambda(j, rb) * Rji) * bd.volume;
    }
    return r;
}

template <int D>
struct ResidualVector {
    std::vector<double> values;  ///< interleaved [r^u_0 .. r^u_{D-1}, r^p] per point
    std::vector<double> raw;     ///< same without constraint row replacement

    double momentum_norm() const {
        double s = 0.0;
        for (Index k = 0; k < values.size(); ++k)
            if (k % (D + 1) != D) s += values[k] * values[k];
        return std::sqrt(s);
    }
    double mass_norm() const {
        double s = 0.0;
        for (Index k = D; k < values.size(); k += D + 1) s += values[k] * values[k];
        return std::sqrt(s);
    }
};

/// Row residual of a constraint, scaled so that its derivative with respect to the
/// acceleration (or pressure-rate) increment is one.
template <int D>
double constraint_residual(const Model<D>& m, const State<D>& s, const DofConstraint& c,
                           const NewmarkParams& nm) {
    const double target = m.target(c, s.time);
    switch (c.kind) {
        case ConstraintKind::Displacement: return (s.u[c.point][c.component] - target) / nm.c_u();
        case ConstraintKind::Velocity: return (s.v[c.point][c.component] - target) / nm.c_v();
        case ConstraintKind::Pressure: return (s.p[c.point] - target) / nm.c_p();
    }
    return 0.0;
}

template <int D>
ResidualVector<D> assemble_residuals(const Model<D>& m, const State<D>& s, const Evaluation<D>& ev,
                                     const NewmarkParams& nm) {
    ResidualVector<D> r;
    r.raw.assign(m.dofs(), 0.0);
    const auto b = m.body_forces(s.time);
    parallel_for(m.size(), [&](Index i) {
        const auto& e = ev[i];
        const Vec<D> ru = e.rho * (s.a[i] - m.gravity) - internal_force_density(m, ev, i) -
                          stabilization_force_density(m, s, ev, i) - b[i];
        double rp = volume_rate_density(m, s, i) + flow_density(m, ev, i) +
                    stabilization_flow_density(m, s, ev, i);
        if (m.flags.storage_term) rp += e.phi / m.flow.fluid_bulk * s.pdot[i];
        double* out = r.raw.data() + i * (D + 1);
        for (int c = 0; c < D; ++c) out[c] = ru[c];
        out[D] = rp;
        for (int c = 0; c <= D; ++c)
            if (!std::isfinite(out[c])) throw NonFiniteResidual(i);
    });
    r.values = r.raw;
    for (const auto& c : m.constraints)
        r.values[m.points[c.point].dof(c.component)] = constraint_residual(m, s, c, nm);
    return r;
}

template <int D>
ResidualVector<D> assemble_residuals(const Model<D>& m, const State<D>& s, const NewmarkParams& nm) {
    return assemble_residuals(m, s, evaluate(m, s), nm);
}

}  // namespace peripore

#endif  // PERIPORE_BALANCE_HPP
