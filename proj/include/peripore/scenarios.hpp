// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file scenarios.hpp
/// \brief Boundary conditions, probes, the packaged experiments and the time-stepping run.
///
/// Vertical is the last spatial axis: x in 1D, y in 2D.

#ifndef PERIPORE_SCENARIOS_HPP
#define PERIPORE_SCENARIOS_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "peripore/solver.hpp"

namespace peripore {

enum class SolidCondition { Free, Fixed, Roller, Traction, Velocity };
enum class FluidCondition { Impermeable, Drained };

inline const char* to_string(SolidCondition c) {
    switch (c) {
        case SolidCondition::Free: return "free";
        case SolidCondition::Fixed: return "fixed";
        case SolidCondition::Roller: return "roller";
        case SolidCondition::Traction: return "traction";
        case SolidCondition::Velocity: return "velocity";
    }
    return "?";
}
inline const char* to_string(FluidCondition c) {
    return c == FluidCondition::Drained ? "drained" : "impermeable";
}

/// One face of the box. Traction and velocity act along the inward normal, so a positive
/// value compresses the body.
struct FaceCondition {
    SolidCondition solid = SolidCondition::Free;
    FluidCondition fluid = FluidCondition::Impermeable;
    LoadProtocol load;            ///< traction [kPa] or normal velocity [m/s]
    bool fix_tangential = false;  ///< velocity faces: hold tangential displacement at zero
    double from = -std::numeric_limits<double>::infinity();  ///< traction extent along the
    double to = std::numeric_limits<double>::infinity();     ///< first tangential axis [m]
};

struct BoundarySpec {
    std::array<FaceCondition, 6> faces;
    FaceCondition& operator[](Face f) { return faces[std::size_t(f)]; }
    const FaceCondition& operator[](Face f) const { return faces[std::size_t(f)]; }
};

enum class Channel { Displacement, Pressure, ShearStrain, PlasticVolumeStrain };

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::Displacement: return "u";
        case Channel::Pressure: return "p";
        case Channel::ShearStrain: return "eps_s";
        case Channel::PlasticVolumeStrain: return "eps_vp";
    }
    return "?";
}

struct ProbeSpec {
    std::string name;
    std::array<double, 3> at{0, 0, 0};  ///< snapped to the nearest material point
    std::vector<Channel> channels{Channel::Displacement, Channel::Pressure};
};

struct ScenarioConfig {
    std::string name;
    bool desk_scale = true;

    GridSpec grid;
    SolidModel solid;
    FlowParams flow;
    double solid_density = 0.0;  ///< [kg/m^3]
    double porosity = 0.0;
    double G = 0.0;
    ModelFlags flags;
    InfluenceFunction::Kind influence = InfluenceFunction::Kind::Unit;
    double gravity = 0.0;  ///< [m/s^2] along the negative vertical axis

    double initial_stress = 0.0;  ///< isotropic effective stress [kPa]
    bool equilibrate = false;     ///< solve static equilibrium before stepping

    NewmarkParams newmark;
    NewtonSettings newton;
    std::string linear_solver = "auto";
    double t_end = 0.0;
    double stop_displacement = 0.0;  ///< stop once the monitor face moved this far [m]

    BoundarySpec boundary;
    std::optional<Face> monitor_face;  ///< reaction and mean displacement are recorded here

    std::vector<ProbeSpec> probes;
    int probe_stride = 1;
    std::vector<double> snapshot_times;

    void validate() const {
        if (grid.dimension < 1 || grid.dimension > 3) throw ConfigError("dimension must be 1, 2 or 3");
        grid.cells();
        solid.validate();
        flow.validate();
        if (!(solid_density > 0.0)) throw ConfigError("solid_density must be positive");
        if (!(porosity >= 0.0 && porosity <= 1.0)) throw ConfigError("porosity must lie in [0, 1]");
        if (!(G >= 0.0)) throw ConfigError("G must be non-negative");
        newmark.validate();
        newton.validate();
        if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
        if (probe_stride < 1) throw ConfigError("probe_stride must be >= 1");
        for (const auto& f : boundary.faces) f.load.validate();
    }
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"consolidation_step", "consolidation_harmonic",
                                                "strip_footing_wave", "strain_localization"};
    return names;
}

namespace detail {

inline SolidModel elastic_solid(double K, double mu) {
    SolidModel s;
    s.elastic = {K, mu};
    return s;
}

inline void column_geometry(ScenarioConfig& c) {
    c.grid.spacing = 0.04;
    c.grid.horizon_factor = 2.05;
    if (c.desk_scale) {
        c.grid.dimension = 1;
        c.grid.extents = {10.0, 0, 0};
    } else {
        c.grid.dimension = 2;
        c.grid.extents = {4.0, 10.0, 0};
    }
}

/// Laterally confined column: base fixed, load and drainage on top.
inline void column_boundary(ScenarioConfig& c, const LoadProtocol& load) {
    const int v = c.grid.dimension - 1;
    auto& base = c.boundary[min_face(v)];
    base.solid = SolidCondition::Fixed;
    auto& top = c.boundary[max_face(v)];
    top.solid = SolidCondition::Traction;
    top.fluid = FluidCondition::Drained;
    top.load = load;
    for (int a = 0; a < v; ++a) {
        c.boundary[min_face(a)].solid = SolidCondition::Roller;
        c.boundary[max_face(a)].solid = SolidCondition::Roller;
    }
    c.monitor_face = max_face(v);
}

inline void column_probes(ScenarioConfig& c) {
    const int v = c.grid.dimension - 1;
    const double H = c.grid.extents[std::size_t(v)], dx = c.grid.spacing;
    ProbeSpec A{"A", {0, 0, 0}, {Channel::Displacement, Channel::Pressure}};
    ProbeSpec B{"B", {0, 0, 0}, {Channel::Displacement, Channel::Pressure}};
    for (int a = 0; a < v; ++a) A.at[std::size_t(a)] = B.at[std::size_t(a)] = 0.5 * c.grid.extents[std::size_t(a)];
    A.at[std::size_t(v)] = H - 0.5 * dx;
    B.at[std::size_t(v)] = 0.5 * dx;
    c.probes = {A, B};
}

}  // namespace detail

/// Packaged experiment with its material parameters; desk scale changes geometry only.
inline ScenarioConfig default_config(const std::string& name, bool desk_scale = true) {
    ScenarioConfig c;
    c.name = name;
    c.desk_scale = desk_scale;
    c.newmark.beta1 = 0.605;
    c.newmark.beta2 = 0.6;
    c.newmark.beta3 = 0.6;
    if (name == "consolidation_step") {
        detail::column_geometry(c);
        c.solid = detail::elastic_solid(2.1e5, 9.8e4);
        c.flow = {3.55e-5, 2.2e6, 1000.0};
        c.solid_density = 1884.0;
        c.porosity = 0.48;
        c.G = 1.0;
        c.newmark.dt = 1e-4;
        c.t_end = 0.3;
        detail::column_boundary(c, LoadProtocol::step(1.0));
        detail::column_probes(c);
        c.newton.reuse_tangent = true;
    } else if (name == "consolidation_harmonic") {
        detail::column_geometry(c);
        c.solid = detail::elastic_solid(1.22e4, 5.62e3);
        c.flow = {1.0e-2, 2.2e6, 1000.0};
        c.solid_density = 2000.0;
        c.porosity = 0.33;
        c.G = 1.0;
        c.newmark.dt = 1e-3;
        c.t_end = 0.5;
        detail::column_boundary(c, LoadProtocol::harmonic(160.0, 20.0 * std::numbers::pi));
        detail::column_probes(c);
        c.newton.reuse_tangent = true;
    } else if (name == "strip_footing_wave") {
        c.grid.dimension = 2;
        c.grid.horizon_factor = 2.05;
        if (desk_scale) {
            c.grid.extents = {10.0, 10.0, 0};
            c.grid.spacing = 0.25;
        } else {
            c.grid.extents = {20.0, 12.5, 0};
            c.grid.spacing = 0.05;
        }
        c.solid = detail::elastic_solid(1.22e4, 5.62e3);
        c.flow = {1.0e-2, 2.2e6, 1000.0};
        c.solid_density = 2000.0;
        c.porosity = 0.33;
        c.G = 0.1;
        c.newmark.dt = 5e-4;
        c.t_end = 0.2;
        const double W = c.grid.extents[0], H = c.grid.extents[1];
        c.boundary[Face::YMin].solid = SolidCondition::Fixed;
        c.boundary[Face::XMin].solid = SolidCondition::Roller;
        c.boundary[Face::XMax].solid = SolidCondition::Roller;
        auto& top = c.boundary[Face::YMax];
        top.solid = SolidCondition::Traction;
        top.fluid = FluidCondition::Drained;
        top.load = LoadProtocol::sine_spike(2500.0, 25.0 * std::numbers::pi, 0.04);
        top.from = 0.5 * W - 1.0;
        top.to = 0.5 * W + 1.0;
        c.probes = {ProbeSpec{"A", {0.5 * W, H - 1.0, 0}, {Channel::Displacement, Channel::Pressure}},
                    ProbeSpec{"B", {0.5 * W + 3.0, H - 0.5 * c.grid.spacing, 0},
                              {Channel::Displacement, Channel::Pressure}}};
        c.snapshot_times = {0.05, 0.1, 0.15, 0.2};
        c.monitor_face = Face::YMax;
        c.newton.reuse_tangent = true;
    } else if (name == "strain_localization") {
        c.grid.dimension = 2;
        c.grid.horizon_factor = 2.05;
        if (desk_scale) {
            c.grid.extents = {15.0, 30.0, 0};
            c.grid.spacing = 0.5;
        } else {
            c.grid.extents = {30.0, 60.0, 0};
            c.grid.spacing = 0.3;
        }
        c.solid.kind = SolidModel::Kind::CamClay;
        c.solid.elastic = {2.5e4, 1.154e4};
        c.solid.camclay = {1.0, 0.10, 0.03, -250.0};
        c.flow = {3e-5, 2.0e5, 1000.0};
        c.solid_density = 2000.0;
        c.porosity = 0.3;
        c.G = 0.025;
        c.newmark.dt = 5e-3;
        c.t_end = 3.5;
        c.initial_stress = -100.0;
        c.equilibrate = true;
        c.boundary[Face::YMin].solid = SolidCondition::Fixed;
        auto& top = c.boundary[Face::YMax];
        top.solid = SolidCondition::Velocity;
        top.fix_tangential = true;
        top.load = LoadProtocol::velocity_ramp(0.3, 0.5);
        for (Face f : {Face::XMin, Face::XMax}) {
            c.boundary[f].solid = SolidCondition::Traction;
            c.boundary[f].load = LoadProtocol::constant(100.0);
        }
        const double W = c.grid.extents[0], H = c.grid.extents[1];
        c.probes = {ProbeSpec{"center",
                              {0.5 * W, 0.5 * H, 0},
                              {Channel::Displacement, Channel::Pressure, Channel::ShearStrain,
                               Channel::PlasticVolumeStrain}}};
        c.snapshot_times = {1.0, 2.0, 3.0};
        c.monitor_face = Face::YMax;
        c.newton.reuse_tangent = true;
        c.newton.abs_tol = 1e-6;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return c;
}

/// Built model plus probe placement.
template <int D>
struct Scenario {
    ScenarioConfig config;
    Model<D> model;
    std::vector<Index> probe_points;
    std::vector<double> probe_snap;  ///< distance from the requested coordinate
    std::vector<Index> monitor_points;
    int monitor_axis = 0;
    double monitor_sign = 1.0;  ///< inward normal along monitor_axis
};

namespace detail {

inline int face_axis(Face f) { return int(f) / 2; }
inline double inward(Face f) { return int(f) % 2 == 0 ? 1.0 : -1.0; }

/// Layer of a face: points tagged with it.
template <int D>
std::vector<Index> face_points(const Model<D>& m, Face f) {
    std::vector<Index> out;
    for (Index i = 0; i < m.size(); ++i)
        if (m.points[i].on(f)) out.push_back(i);
    return out;
}

template <int D>
void apply_face(Model<D>& m, Face f, const FaceCondition& fc) {
    const int ax = face_axis(f);
    const double s = inward(f);
    const auto pts = face_points(m, f);
    if (pts.empty()) return;

    if (fc.fluid == FluidCondition::Drained)
        for (Index i : pts) m.constrain(i, D, ConstraintKind::Pressure, -1);

    switch (fc.solid) {
        case SolidCondition::Free: break;
        case SolidCondition::Fixed:
            for (Index i : pts)
                for (int c = 0; c < D; ++c) m.constrain(i, c, ConstraintKind::Displacement, -1);
            break;
        case SolidCondition::Roller:
            for (Index i : pts) m.constrain(i, ax, ConstraintKind::Displacement, -1);
            break;
        case SolidCondition::Velocity: {
            const int pr = m.add_protocol(fc.load);
            for (Index i : pts) {
                m.constrain(i, ax, ConstraintKind::Velocity, pr, s);
                if (fc.fix_tangential)
                    for (int c = 0; c < D; ++c)
                        if (c != ax) m.constrain(i, c, ConstraintKind::Displacement, -1);
            }
            break;
        }
        case SolidCondition::Traction: {
            const int pr = m.add_protocol(fc.load);
            const double depth = double(m.grid.layer_depth()) * m.dx();
            const int tang = D > 1 ? (ax == 0 ? 1 : 0) : -1;
            Vec<D> dir = Vec<D>::Zero();
            dir[ax] = s / depth;
            for (Index i : pts) {
                if (tang >= 0) {
                    const double y = m.points[i].x[tang];
                    if (y < fc.from || y > fc.to) continue;
                }
                m.body_loads.push_back({i, dir, pr});
            }
            break;
        }
    }
}

}  // namespace detail

template <int D>
Scenario<D> build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.grid.dimension != D) throw ConfigError("scenario dimension does not match");
    Scenario<D> sc;
    sc.config = cfg;
    sc.model = make_model<D>(cfg.grid, cfg.solid, cfg.flow, cfg.solid_density, cfg.porosity, cfg.G,
                             cfg.flags, cfg.influence);
    sc.model.gravity[D - 1] = -cfg.gravity;
    // Constraints are applied face by face; a later face overrides an earlier one at corners.
    for (int f = 0; f < 2 * D; ++f) {
        const FaceCondition& fc = cfg.boundary.faces[std::size_t(f)];
        if (fc.solid == SolidCondition::Traction) detail::apply_face(sc.model, Face(f), fc);
    }
    for (int f = 0; f < 2 * D; ++f) {
        const FaceCondition& fc = cfg.boundary.faces[std::size_t(f)];
        if (fc.solid != SolidCondition::Traction) detail::apply_face(sc.model, Face(f), fc);
    }

    for (const auto& p : cfg.probes) {
        Vec<D> at;
        for (int a = 0; a < D; ++a) at[a] = p.at[std::size_t(a)];
        Index best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < sc.model.size(); ++i) {
            const double d = (sc.model.points[i].x - at).norm();
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        if (bd > 0.5 * std::sqrt(double(D)) * cfg.grid.spacing * (1 + 1e-12))
            throw ConfigError("probe '" + p.name + "' lies outside the lattice");
        sc.probe_points.push_back(best);
        sc.probe_snap.push_back(bd);
    }
    if (cfg.monitor_face && detail::face_axis(*cfg.monitor_face) < D) {
        sc.monitor_points = detail::face_points(sc.model, *cfg.monitor_face);
        sc.monitor_axis = detail::face_axis(*cfg.monitor_face);
        sc.monitor_sign = detail::inward(*cfg.monitor_face);
    }
    return sc;
}

template <int D>
Scenario<D> build_scenario(const std::string& name, bool desk_scale = true) {
    return build_scenario<D>(default_config(name, desk_scale));
}

/// Equivalent shear strain sqrt(2/3) |dev eps|.
inline double equivalent_shear_strain(const Mat3& eps) { return std::sqrt(2.0 / 3.0) * deviator(eps).norm(); }

struct EquilibriumReport {
    int iterations = 0;
    double initial_norm = 0.0;
    double final_norm = 0.0;
};

/// Static equilibrium of the displacement field with the pressure held fixed: Newton on u
/// with the dynamic tangent at a long step, so inertia is negligible.
template <int D>
EquilibriumReport equilibrate(const Model<D>& m, State<D>& s, const NewtonSettings& ns,
                              const std::string& linear_solver = "auto") {
    Model<D> mq = m;
    for (Index i = 0; i < mq.size(); ++i) mq.constrain(i, D, ConstraintKind::Pressure, -1);
    NewmarkParams nq;
    nq.dt = 1e3;
    NewtonSettings nsq = ns;
    nsq.reuse_tangent = false;
    Integrator<D> integ(mq, nq, nsq, linear_solver);
    State<D> t = s;
    const double cu = nq.c_u();
    EquilibriumReport rep;
    for (int it = 0;; ++it) {
        const Evaluation<D> ev = evaluate(mq, t);
        ResidualVector<D> r = assemble_residuals(mq, t, ev, nq);
        for (Index i = 0; i < t.size(); ++i) r.values[mq.points[i].dof(D)] = 0.0;
        const auto n = residual_norms(mq, r, nq);
        if (it == 0) rep.initial_norm = n.momentum;
        rep.final_norm = n.momentum;
        if (n.momentum <= std::max(ns.abs_tol, ns.rel_tol * rep.initial_norm) &&
            n.constraint <= Integrator<D>::kConstraintTol) {
            rep.iterations = it;
            for (Index i = 0; i < t.size(); ++i) t.history[i] = ev[i].response.state;
            s.u = t.u;
            s.history = t.history;
            return rep;
        }
        if (it >= ns.max_iter) throw NonConvergence(it, n.momentum);
        const Eigen::VectorXd dx = integ.newton_step(t, ev, r);
        for (Index i = 0; i < t.size(); ++i)
            for (int c = 0; c < D; ++c) t.u[i][c] += cu * dx[long(i * Index(D + 1) + Index(c))];
    }
}

/// Initial fields: zero motion and pressure, isotropic effective stress, and (for
/// Cam-Clay) the initial preconsolidation pressure. Equilibrates when configured.
template <int D>
State<D> initial_state(const Scenario<D>& sc, EquilibriumReport* report = nullptr) {
    auto s = State<D>::zeros(sc.model.size());
    for (auto& h : s.history) {
        h.stress = sc.config.initial_stress * Mat3::Identity();
        if (sc.model.solid.kind == SolidModel::Kind::CamClay) h.pc = sc.model.solid.camclay.pc0;
    }
    if (sc.config.equilibrate) {
        const auto rep = equilibrate(sc.model, s, sc.config.newton, sc.config.linear_solver);
        if (report) *report = rep;
    }
    return s;
}

struct SnapshotRecord {
    Index id = 0;
    std::array<long, 3> lattice{0, 0, 0};
    std::array<double, 3> x{0, 0, 0};
    std::array<double, 3> u{0, 0, 0};
    double p = 0.0;
    double eps_s = 0.0;
    double eps_vp = 0.0;
    double pc = 0.0;
    double J = 1.0;
    bool interior = true;
};

struct FieldSnapshot {
    int dimension = 1;
    Index step = 0;
    double time = 0.0;
    double monitor_displacement = 0.0;
    std::vector<SnapshotRecord> records;
};

struct ProbeSeries {
    std::string name;
    Index point = 0;
    double snap_distance = 0.0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> samples;  ///< one row per sample time
};

struct RunStats {
    Index steps = 0;
    long iterations = 0;
    long factorizations = 0;
    double wall_seconds = 0.0;
};

struct RunResult {
    std::string scenario;
    int dimension = 1;
    std::vector<double> time;
    std::vector<ProbeSeries> probes;
    std::vector<double> monitor_displacement;  ///< mean inward displacement of the monitor layer [m]
    std::vector<double> reaction;              ///< inward constraint force on the monitor layer
    std::vector<FieldSnapshot> snapshots;
    EquilibriumReport equilibrium;
    RunStats stats;
    bool complete = true;
    std::string error;
    int error_class = 0;  ///< 0 ok, otherwise an exit code from cli_io
};

namespace detail {

template <int D>
double monitor_displacement(const Scenario<D>& sc, const State<D>& s) {
    if (sc.monitor_points.empty()) return 0.0;
    double u = 0.0;
    for (Index i : sc.monitor_points) u += sc.monitor_sign * s.u[i][sc.monitor_axis];
    return u / double(sc.monitor_points.size());
}

template <int D>
double reaction(const Scenario<D>& sc, const ResidualVector<D>& r) {
    double f = 0.0;
    const auto& m = sc.model;
    for (Index i : sc.monitor_points) {
        const Index dof = m.points[i].dof(sc.monitor_axis);
        if (m.constrained(dof)) f += sc.monitor_sign * m.points[i].volume * r.raw[dof];
    }
    return f;
}

template <int D>
FieldSnapshot snapshot(const Scenario<D>& sc, const State<D>& s, const Evaluation<D>& ev, Index step) {
    FieldSnapshot fs;
    fs.dimension = D;
    fs.step = step;
    fs.time = s.time;
    fs.monitor_displacement = monitor_displacement(sc, s);
    fs.records.resize(sc.model.size());
    for (Index i = 0; i < sc.model.size(); ++i) {
        auto& r = fs.records[i];
        const auto& pt = sc.model.points[i];
        const auto& st = ev[i].response.state;
        r.id = pt.id;
        r.interior = pt.interior();
        for (int a = 0; a < D; ++a) {
            r.lattice[std::size_t(a)] = pt.lattice[std::size_t(a)];
            r.x[std::size_t(a)] = pt.x[a];
            r.u[std::size_t(a)] = s.u[i][a];
        }
        r.p = s.p[i];
        r.eps_s = equivalent_shear_strain(st.strain);
        r.eps_vp = st.plastic_strain.trace();
        r.pc = st.pc;
        r.J = ev[i].J;
    }
    return fs;
}

}  // namespace detail

struct RunOptions {
    DiagnosticSink sink;
    bool record_snapshots = true;
    double t_end = -1.0;  ///< overrides the config when non-negative
};

/// Steps the scenario from `s` and records probes, monitor quantities and snapshots.
/// Solver errors end the run; the result is then flagged incomplete and keeps what was
/// recorded so far.
template <int D>
RunResult run(const Scenario<D>& sc, State<D> s, const RunOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& cfg = sc.config;
    RunResult res;
    res.scenario = cfg.name;
    res.dimension = D;
    for (Index k = 0; k < sc.probe_points.size(); ++k) {
        ProbeSeries ps;
        ps.name = cfg.probes[k].name;
        ps.point = sc.probe_points[k];
        ps.snap_distance = sc.probe_snap[k];
        static const char* axes = "xyz";
        for (Channel c : cfg.probes[k].channels) {
            if (c == Channel::Displacement)
                for (int a = 0; a < D; ++a) ps.columns.push_back(std::string("u") + axes[a]);
            else
                ps.columns.push_back(to_string(c));
        }
        res.probes.push_back(std::move(ps));
    }

    auto sample = [&](const State<D>& st, const Evaluation<D>& ev, const ResidualVector<D>& r) {
        res.time.push_back(st.time);
        for (Index k = 0; k < res.probes.size(); ++k) {
            const Index i = res.probes[k].point;
            const auto& hs = ev[i].response.state;
            std::vector<double> row;
            for (Channel c : cfg.probes[k].channels) {
                switch (c) {
                    case Channel::Displacement:
                        for (int a = 0; a < D; ++a) row.push_back(st.u[i][a]);
                        break;
                    case Channel::Pressure: row.push_back(st.p[i]); break;
                    case Channel::ShearStrain: row.push_back(equivalent_shear_strain(hs.strain)); break;
                    case Channel::PlasticVolumeStrain: row.push_back(hs.plastic_strain.trace()); break;
                }
            }
            res.probes[k].samples.push_back(std::move(row));
        }
        res.monitor_displacement.push_back(detail::monitor_displacement(sc, st));
        res.reaction.push_back(detail::reaction(sc, r));
    };

    Integrator<D> integ(sc.model, cfg.newmark, cfg.newton, cfg.linear_solver);
    if (opt.sink) integ.set_sink(opt.sink);
    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    const double dt = cfg.newmark.dt;
    auto take_snapshots = [&](const State<D>& st, const Evaluation<D>& ev, Index step) {
        while (next_snap < snaps.size() && snaps[next_snap] <= st.time + 0.5 * dt) {
            if (opt.record_snapshots) res.snapshots.push_back(detail::snapshot(sc, st, ev, step));
            ++next_snap;
        }
    };

    {
        const Evaluation<D> ev = evaluate(sc.model, s);
        const auto r = assemble_residuals(sc.model, s, ev, cfg.newmark);
        sample(s, ev, r);
        take_snapshots(s, ev, 0);
    }
    const double t_end = opt.t_end >= 0.0 ? opt.t_end : cfg.t_end;
    const Index nsteps = Index(std::llround(t_end / dt));
    for (Index step = 1; step <= nsteps; ++step) {
        try {
            const StepReport rep = integ.advance(s);
            res.stats.iterations += rep.iterations;
            res.stats.factorizations += rep.factorizations;
        } catch (const NonConvergence& e) {
            res.complete = false;
            res.error = e.what();
            res.error_class = 3;
            break;
        } catch (const Error& e) {
            res.complete = false;
            res.error = e.what();
            res.error_class = 3;
            break;
        }
        res.stats.steps = step;
        const bool stop = cfg.stop_displacement > 0.0 &&
                          detail::monitor_displacement(sc, s) >= cfg.stop_displacement;
        if (step % Index(cfg.probe_stride) == 0 || step == nsteps || stop)
            sample(s, integ.last_evaluation(), integ.last_residual());
        take_snapshots(s, integ.last_evaluation(), step);
        if (stop) {
            if (opt.record_snapshots) res.snapshots.push_back(detail::snapshot(sc, s, integ.last_evaluation(), step));
            break;
        }
    }
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Builds, initializes and runs a scenario of any dimension.
inline RunResult simulate(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
    auto go = [&]<int D>() {
        const Scenario<D> sc = build_scenario<D>(cfg);
        EquilibriumReport eq;
        State<D> s = initial_state(sc, &eq);
        RunResult r = run(sc, std::move(s), opt);
        r.equilibrium = eq;
        return r;
    };
    switch (cfg.grid.dimension) {
        case 1: return go.template operator()<1>();
        case 2: return go.template operator()<2>();
        case 3: return go.template operator()<3>();
    }
    throw ConfigError("dimension must be 1, 2 or 3");
}

}  // namespace peripore

#endif  // PERIPORE_SCENARIOS_HPP
