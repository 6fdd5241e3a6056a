// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file checks.hpp
/// \brief Self-checks run by `peripore verify` and the acceptance driver: patch tests,
/// the hourglass mode, energy quadrature, finite-difference tangents, the double-loop
/// residual and global balance sums. Small lattice builders shared with the unit tests
/// live here as well.

#ifndef PERIPORE_CHECKS_HPP
#define PERIPORE_CHECKS_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "peripore/solver.hpp"
#include "peripore/verify.hpp"

namespace peripore::checks {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool pass = false;
    std::string detail;
};

/// Full box of n^D points at spacing dx, without fictitious layers.
template <int D>
std::vector<MaterialPoint<D>> box(int n, double dx) {
    std::vector<MaterialPoint<D>> pts;
    std::array<int, 3> k{0, 0, 0};
    const int total = D == 1 ? n : D == 2 ? n * n : n * n * n;
    for (int c = 0; c < total; ++c) {
        int r = c;
        MaterialPoint<D> p;
        p.id = pts.size();
        for (int a = 0; a < D; ++a) {
            k[a] = r % n;
            r /= n;
            p.x[a] = (k[a] + 0.5) * dx;
            p.lattice[a] = k[a];
        }
        p.volume = std::pow(dx, D);
        pts.push_back(p);
    }
    return pts;
}

inline GridSpec spec(int dim, double dx) {
    GridSpec g;
    g.dimension = dim;
    g.spacing = dx;
    return g;
}

inline SolidModel elastic(double K = 2.0e4, double mu = 1.0e4) {
    SolidModel s;
    s.kind = SolidModel::Kind::Elastic;
    s.elastic = {K, mu};
    return s;
}

inline SolidModel camclay(double K = 2.0e4, double mu = 1.0e4) {
    SolidModel s = elastic(K, mu);
    s.kind = SolidModel::Kind::CamClay;
    s.camclay = {1.0, 0.1, 0.03, -250.0};
    return s;
}

inline FlowParams water(double k = 1e-3) { return {k, 2.0e6, 1000.0}; }

template <int D>
Model<D> box_model(int n, double dx, double G, SolidModel solid = elastic(), ModelFlags flags = {},
                   FlowParams flow = water()) {
    return make_model<D>(box<D>(n, dx), spec(D, dx), solid, flow, 2700.0, 0.4, G, flags);
}

/// Random iterate with displacement gradients of order `strain`.
template <int D>
State<D> random_state(const Model<D>& m, std::mt19937& rng, double strain, double pressure = 50.0) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto s = State<D>::zeros(m.size());
    s.time = 0.37;
    const double ua = strain * m.dx();
    for (Index i = 0; i < m.size(); ++i) {
        for (int c = 0; c < D; ++c) {
            s.u[i][c] = ua * U(rng);
            s.v[i][c] = 0.1 * U(rng);
            s.a[i][c] = 3.0 * U(rng);
        }
        s.p[i] = pressure * U(rng);
        s.pdot[i] = 100.0 * U(rng);
    }
    return s;
}

/// Random corrector increment with separate scales for acceleration and pressure rate.
template <int D>
std::vector<double> random_delta(const Model<D>& m, std::mt19937& rng, double a_scale, double pd_scale) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> d(m.dofs());
    for (Index k = 0; k < d.size(); ++k) d[k] = (k % (D + 1) == D ? pd_scale : a_scale) * U(rng);
    return d;
}

/// The same model and state written in the oracle's plain form.
template <int D>
oracle::BruteForceInput oracle_input(const Model<D>& m, const State<D>& s,
                                     const std::vector<Vec<D>>& body) {
    oracle::BruteForceInput in;
    in.dim = D;
    in.delta = m.grid.horizon();
    in.K = m.solid.elastic.bulk;
    in.mu = m.solid.elastic.shear;
    in.prestress = s.history.empty() ? Mat3::Zero() : s.history[0].stress;
    in.k_w = m.flow.conductivity;
    in.K_w = m.flow.fluid_bulk;
    in.phi = m.porosity;
    in.rho = kDensityScale * mixture_density(m.porosity, m.solid_density, m.flow.fluid_density);
    in.G = m.stab.G;
    in.C = m.stab.C;
    in.Kp = m.stab.Kp;
    in.storage = m.flags.storage_term;
    auto v3 = [](const Vec<D>& v) {
        Eigen::Vector3d r = Eigen::Vector3d::Zero();
        r.head<D>() = v;
        return r;
    };
    in.gravity = v3(m.gravity);
    for (Index i = 0; i < m.size(); ++i) {
        in.x.push_back(v3(m.points[i].x));
        in.volume.push_back(m.points[i].volume);
        in.u.push_back(v3(s.u[i]));
        in.v.push_back(v3(s.v[i]));
        in.a.push_back(v3(s.a[i]));
        in.body.push_back(v3(body[i]));
        in.p.push_back(s.p[i]);
        in.pdot.push_back(s.pdot[i]);
    }
    return in;
}

inline Mat3 random_symmetric(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Mat3 A;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) A(a, b) = scale * U(rng);
    return 0.5 * (A + A.transpose());
}

struct PatchErrors {
    double F = 0.0;         ///< max |F~ - F| / |F|
    double grad = 0.0;      ///< max |grad~ p - grad p| / |grad p|
    double solid_R = 0.0;   ///< max |R^s| / max |u|
    double fluid_R = 0.0;   ///< max |R^w| / max |p|
    Index points = 0;
};

/// Random affine displacement and linear pressure on a 3D block with fictitious layers.
inline PatchErrors patch_test(std::uint32_t seed, int n = 5, double dx = 0.1) {
    GridSpec g;
    g.dimension = 3;
    g.extents = {n * dx, n * dx, n * dx};
    g.spacing = dx;
    const auto pts = generate_grid<3>(g);
    const auto fam = build_families<3>(pts, g.horizon());
    const InfluenceFunction w{InfluenceFunction::Kind::Unit, g.horizon()};
    const auto kt = build_kernels<3>(fam, w);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Mat<3> H;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) H(r, c) = 0.05 * U(rng);
    const Vec<3> u0(U(rng), U(rng), U(rng)), gp(100.0 * U(rng), 100.0 * U(rng), 100.0 * U(rng));
    const double p0 = 50.0 * U(rng);
    std::vector<Vec<3>> u(pts.size());
    std::vector<double> p(pts.size());
    double umax = 0.0, pmax = 0.0;
    for (Index i = 0; i < pts.size(); ++i) {
        u[i] = 1e-3 * u0 + H * pts[i].x;
        p[i] = p0 + gp.dot(pts[i].x);
        umax = std::max(umax, u[i].norm());
        pmax = std::max(pmax, std::abs(p[i]));
    }
    const Mat<3> F = Mat<3>::Identity() + H;
    PatchErrors e;
    e.points = pts.size();
    for (Index i = 0; i < pts.size(); ++i) {
        const Mat<3> Fi = kt.deformation_gradient(fam, i, u);
        const Vec<3> gi = kt.pressure_gradient(fam, i, p);
        e.F = std::max(e.F, (Fi - F).norm() / F.norm());
        e.grad = std::max(e.grad, (gi - gp).norm() / gp.norm());
        const auto R = nonuniform_states<3>(fam.of(i), i, u, p, Fi, gi);
        for (const auto& r : R.solid) e.solid_R = std::max(e.solid_R, r.norm() / umax);
        for (double r : R.fluid) e.fluid_R = std::max(e.fluid_R, std::abs(r) / pmax);
    }
    return e;
}

struct HourglassReport {
    double F_deviation = 0.0;  ///< max |F~ - I| over interior points
    double min_force = 0.0;    ///< smallest |T^s| over interior points
    double bound = 0.0;        ///< 0.5 (G C / w0) a (family volume), largest over those points
    double energy = 0.0;       ///< -1/2 sum V T^s . u for the mode
};

/// Alternating 1D displacement u_i = a (-1)^i on a bar with fictitious layers.
inline HourglassReport hourglass_mode(double G = 1.0, double a = 1e-4) {
    GridSpec g;
    g.dimension = 1;
    g.extents = {2.0, 0, 0};
    g.spacing = 0.1;
    auto m = make_model<1>(g, elastic(), water(), 2700.0, 0.4, G, ModelFlags{});
    auto s = State<1>::zeros(m.size());
    for (Index i = 0; i < m.size(); ++i)
        s.u[i][0] = a * ((m.points[i].lattice[0] % 2 == 0) ? 1.0 : -1.0);
    const auto ev = evaluate(m, s);
    HourglassReport h;
    h.min_force = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.size(); ++i) {
        const Vec<1> Ts = stabilization_force_density(m, s, ev, i);
        h.energy -= 0.5 * m.points[i].volume * Ts.dot(s.u[i]);
        if (!m.points[i].interior()) continue;
        h.F_deviation = std::max(h.F_deviation, std::abs(ev[i].F(0, 0) - 1.0));
        double fam_volume = 0.0;
        for (const auto& bd : m.families.of(i)) fam_volume += bd.volume;
        h.min_force = std::min(h.min_force, Ts.norm());
        h.bound = std::max(h.bound, 0.5 * (G * m.stab.C / m.kernels.omega0[i]) * a * fam_volume);
    }
    return h;
}

struct QuadratureReport {
    std::vector<int> resolutions;
    std::vector<double> solid, fluid;  ///< quadrature energy over classical energy
    bool monotone = true;
};

/// Horizon quadrature of the stabilization energies for the library's 3D constants.
inline QuadratureReport energy_equivalence(std::vector<int> resolutions = {4, 8, 16}) {
    const ElasticParams e{2.1e5, 9.8e4};
    const double k = 3.55e-5, delta = 0.082;
    QuadratureReport q;
    q.resolutions = resolutions;
    for (int r : resolutions) {
        q.solid.push_back(oracle::energy_equivalence_quadrature(
            oracle::EnergyKind::Solid, 3, micromodulus(e, delta, 3), delta, r,
            oracle::classical_solid_energy(3, e.bulk, e.shear)));
        q.fluid.push_back(oracle::energy_equivalence_quadrature(
            oracle::EnergyKind::Fluid, 3, micro_conductivity(k, delta, 3), delta, r,
            oracle::classical_fluid_energy(3, k)));
    }
    for (std::size_t i = 1; i < resolutions.size(); ++i) {
        q.monotone = q.monotone && std::abs(q.solid[i] - 1.0) <= std::abs(q.solid[i - 1] - 1.0) &&
                     std::abs(q.fluid[i] - 1.0) <= std::abs(q.fluid[i - 1] - 1.0);
    }
    return q;
}

namespace detail {

template <int D>
void constrain_edges(Model<D>& m) {
    const int pr = m.add_protocol(LoadProtocol::harmonic(1e-4, 3.0));
    for (Index i = 0; i < m.size(); ++i) {
        if (m.points[i].lattice[0] == 0) m.constrain(i, 0, ConstraintKind::Displacement, pr);
        if (m.points[i].lattice[0] == 1) m.constrain(i, D, ConstraintKind::Pressure, -1);
    }
    m.constrain(m.size() - 1, 0, ConstraintKind::Velocity, -1);
}

}  // namespace detail

/// FD tangent check of a small elastic box with prestress, gravity and mixed constraints.
template <int D>
FdReport fd_elastic(int n, double G, std::uint32_t seed, ModelFlags flags = {}) {
    std::mt19937 rng(seed);
    auto m = box_model<D>(n, 0.1, G, elastic(), flags);
    for (int c = 0; c < D; ++c) m.gravity[c] = -3.0;
    detail::constrain_edges(m);
    auto s = random_state(m, rng, 2e-2);
    for (auto& h : s.history) h.stress = -80.0 * Mat3::Identity();
    const NewmarkParams nm;
    const auto d = random_delta(m, rng, 5.0, 50.0);
    return fd_tangent_check(m, s, std::span<const double>(d), nm, 1e-6, 50.0);
}

struct PlasticFd {
    FdReport report;
    int plastic_points = 0;
    int points = 0;
};

/// FD tangent check of a 5x5 Cam-Clay box driven onto the yield surface at every point.
inline PlasticFd fd_plastic(std::uint32_t seed = 9) {
    std::mt19937 rng(seed);
    auto m = box_model<2>(5, 0.1, 1.0, camclay());
    auto s = random_state(m, rng, 1e-3);
    Mat<2> H;
    H << -2e-3, 6e-3, 0.0, -1e-3;
    for (Index i = 0; i < m.size(); ++i) s.u[i] += H * m.points[i].x;
    for (auto& h : s.history) {
        h.stress = -100.0 * Mat3::Identity();
        h.pc = -120.0;
    }
    const NewmarkParams nm;
    const auto d = random_delta(m, rng, 1.0, 10.0);
    PlasticFd out;
    auto trial = newmark_predict(s, nm);
    newmark_correct(trial, std::span<const double>(d), nm);
    for (const auto& e : evaluate(m, trial)) out.plastic_points += e.response.plastic ? 1 : 0;
    out.points = int(m.size());
    out.report = fd_tangent_check(m, s, std::span<const double>(d), nm, 1e-7, 50.0);
    return out;
}

/// Largest blockwise relative deviation of the assembled residual from the double-loop
/// oracle over `count` random elastic states of dimension D.
template <int D>
double brute_force_sweep(int n, int count, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        ModelFlags flags;
        flags.storage_term = t % 3 != 0;
        auto m = box_model<D>(n, 0.1, 2.0 * U(rng), elastic(1e4 + 3e4 * U(rng), 5e3 + 1e4 * U(rng)), flags);
        for (int c = 0; c < D; ++c) m.gravity[c] = -10.0 * U(rng);
        const int pr = m.add_protocol(LoadProtocol::constant(1.0));
        for (Index i = 0; i < m.size(); i += 3) {
            Vec<D> dir;
            for (int c = 0; c < D; ++c) dir[c] = 20.0 * (U(rng) - 0.5);
            m.body_loads.push_back({i, dir, pr});
        }
        auto s = random_state(m, rng, 2e-2);
        const Mat3 pre = random_symmetric(rng, 100.0);
        for (auto& h : s.history) h.stress = pre;

        const auto r = assemble_residuals(m, s, NewmarkParams{}).raw;
        const auto ref = oracle::brute_force_residual(oracle_input(m, s, m.body_forces(s.time)));
        double du = 0, ru = 0, dp = 0, rp = 0;
        for (Index k = 0; k < r.size(); ++k) {
            const bool pres = k % (D + 1) == D;
            (pres ? dp : du) = std::max(pres ? dp : du, std::abs(r[k] - ref[k]));
            (pres ? rp : ru) = std::max(pres ? rp : ru, std::abs(ref[k]));
        }
        worst = std::max({worst, ru > 0 ? du / ru : du, rp > 0 ? dp / rp : dp});
    }
    return worst;
}

struct ConservationReport {
    int steps = 0;
    double force = 0.0;  ///< max over steps of |sum (T + T^s) V| / sum |T + T^s| V
    double flow = 0.0;   ///< same for Q + Q^s
};

/// Steps an unconstrained 2D box from a random state and records the relative global sums
/// of the internal force and flow densities after every step.
inline ConservationReport conservation(int steps = 5, std::uint32_t seed = 5) {
    std::mt19937 rng(seed);
    auto m = box_model<2>(6, 0.1, 1.3);
    auto s = random_state(m, rng, 1e-2);
    s.time = 0.0;
    NewmarkParams nm;
    nm.dt = 1e-3;
    Integrator<2> integ(m, nm, NewtonSettings{});
    ConservationReport rep;
    auto measure = [&](const State<2>& st) {
        const auto ev = evaluate(m, st);
        Vec<2> T = Vec<2>::Zero();
        double Q = 0.0, Ts = 0.0, Qs = 0.0;
        for (Index i = 0; i < m.size(); ++i) {
            const double V = m.points[i].volume;
            const Vec<2> t = internal_force_density(m, ev, i) + stabilization_force_density(m, st, ev, i);
            const double q = flow_density(m, ev, i) + stabilization_flow_density(m, st, ev, i);
            T += V * t;
            Q += V * q;
            Ts += V * t.norm();
            Qs += V * std::abs(q);
        }
        rep.force = std::max(rep.force, Ts > 0 ? T.norm() / Ts : T.norm());
        rep.flow = std::max(rep.flow, Qs > 0 ? std::abs(Q) / Qs : std::abs(Q));
    };
    measure(s);
    for (int k = 0; k < steps; ++k) {
        integ.advance(s);
        measure(s);
        ++rep.steps;
    }
    return rep;
}

inline CheckResult make_result(std::string name, double measured, double limit, bool pass,
                               std::string detail = {}) {
    return {std::move(name), measured, limit, pass, std::move(detail)};
}

/// The verification suite of the `verify` subcommand.
inline std::vector<CheckResult> verification_suite() {
    std::vector<CheckResult> out;
    char buf[256];

    const auto pt = patch_test(1);
    const double pmax = std::max({pt.F, pt.grad, pt.solid_R, pt.fluid_R});
    std::snprintf(buf, sizeof buf, "F %.2e grad %.2e R^s %.2e R^w %.2e over %zu points", pt.F, pt.grad,
                  pt.solid_R, pt.fluid_R, std::size_t(pt.points));
    out.push_back(make_result("patch test (3D affine u, linear p)", pmax, 1e-12, pmax <= 1e-12, buf));

    const auto hg = hourglass_mode();
    std::snprintf(buf, sizeof buf, "|F-I| %.2e  |T^s| %.3e >= %.3e  W_s %.3e", hg.F_deviation,
                  hg.min_force, hg.bound, hg.energy);
    out.push_back(make_result("hourglass mode resisted", hg.min_force, hg.bound,
                              hg.F_deviation <= 1e-12 && hg.min_force >= hg.bound && hg.energy > 0.0, buf));

    const auto q = energy_equivalence({4, 8, 16});
    const double r8 = std::max(std::abs(q.solid[1] - 1.0), std::abs(q.fluid[1] - 1.0));
    std::snprintf(buf, sizeof buf, "solid %.4f %.4f %.4f  fluid %.4f %.4f %.4f", q.solid[0], q.solid[1],
                  q.solid[2], q.fluid[0], q.fluid[1], q.fluid[2]);
    out.push_back(make_result("energy quadrature ratio at resolution 8", r8, 0.05, r8 <= 0.05 && q.monotone, buf));

    double fd = 0.0;
    for (double G : {0.0, 0.1, 1.0, 2.0})
        fd = std::max({fd, fd_elastic<1>(7, G, 1).max_relative(), fd_elastic<2>(5, G, 2).max_relative(),
                       fd_elastic<3>(3, G, 3).max_relative()});
    out.push_back(make_result("FD tangent, elastic", fd, 1e-5, fd <= 1e-5));
    const auto pl = fd_plastic();
    std::snprintf(buf, sizeof buf, "%d of %d points plastic", pl.plastic_points, pl.points);
    out.push_back(make_result("FD tangent, Cam-Clay", pl.report.max_relative(), 1e-3,
                              pl.report.max_relative() <= 1e-3 && pl.plastic_points == pl.points, buf));

    const double bf = std::max({brute_force_sweep<1>(7, 34, 101), brute_force_sweep<2>(5, 33, 202),
                                brute_force_sweep<3>(3, 33, 303)});
    out.push_back(make_result("residual vs double-loop oracle (100 states)", bf, 1e-12, bf <= 1e-12));

    const auto cs = conservation();
    const double cm = std::max(cs.force, cs.flow);
    std::snprintf(buf, sizeof buf, "force %.2e flow %.2e over %d steps", cs.force, cs.flow, cs.steps);
    out.push_back(make_result("global balance sums", cm, 1e-10, cm <= 1e-10, buf));

    const NewmarkParams ok{0.605, 0.6, 0.6, 1e-3}, bad{0.5, 0.3, 0.6, 1e-3};
    const bool nm_ok = ok.unconditionally_stable() && !bad.stability_warnings().empty();
    out.push_back(make_result("Newmark stability set", nm_ok ? 0.0 : 1.0, 0.0, nm_ok,
                              bad.stability_warnings().empty() ? "" : bad.stability_warnings().front()));
    return out;
}

}  // namespace peripore::checks

#endif  // PERIPORE_CHECKS_HPP
