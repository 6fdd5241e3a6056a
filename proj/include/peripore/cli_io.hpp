// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file cli_io.hpp
/// \brief Run configuration files, their canonical serialization and the output writers.
///
/// A configuration is a JSON document (comments allowed) naming a scenario plus any
/// overrides of that scenario's defaults. The layout is the one produced by
/// `serialize_config`; every key not present in that layout is rejected. Dimensional
/// numbers may be written as bare numbers in the canonical unit or as strings carrying
/// a unit suffix, e.g. "2.1e5 kPa", "10 cm", "5 ms".

#ifndef PERIPORE_CLI_IO_HPP
#define PERIPORE_CLI_IO_HPP

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peripore/scenarios.hpp"

namespace peripore {

class IoError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

using Log = std::function<void(const std::string&)>;

struct RunConfig {
    ScenarioConfig scenario;
    std::string output_dir;  ///< relative paths resolve against the output root
};

/// PERIPORE_OUTPUT_ROOT when set, otherwise the working directory.
inline std::filesystem::path output_root() {
    if (const char* env = std::getenv("PERIPORE_OUTPUT_ROOT"); env && *env) return env;
    return std::filesystem::current_path();
}

inline std::filesystem::path resolve_output(const std::string& dir) {
    const std::filesystem::path p(dir);
    return p.is_absolute() ? p : output_root() / p;
}

inline const char* to_string(SolidModel::Kind k) { return k == SolidModel::Kind::CamClay ? "camclay" : "elastic"; }
inline const char* to_string(InfluenceFunction::Kind k) {
    return k == InfluenceFunction::Kind::InverseBondLength ? "inverse_bond_length" : "unit";
}

namespace io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Dim { None, Length, Time, Pressure, Velocity, Density, Acceleration, Frequency };

inline const char* canonical_unit(Dim d) {
    switch (d) {
        case Dim::None: return "";
        case Dim::Length: return "m";
        case Dim::Time: return "s";
        case Dim::Pressure: return "kPa";
        case Dim::Velocity: return "m/s";
        case Dim::Density: return "kg/m^3";
        case Dim::Acceleration: return "m/s^2";
        case Dim::Frequency: return "rad/s";
    }
    return "";
}

struct UnitEntry {
    Dim dim;
    double factor;  ///< to the canonical unit
};

inline const std::map<std::string, UnitEntry>& unit_table() {
    static const std::map<std::string, UnitEntry> t{
        {"m", {Dim::Length, 1.0}},         {"cm", {Dim::Length, 1e-2}},
        {"mm", {Dim::Length, 1e-3}},       {"km", {Dim::Length, 1e3}},
        {"s", {Dim::Time, 1.0}},           {"ms", {Dim::Time, 1e-3}},
        {"min", {Dim::Time, 60.0}},        {"kPa", {Dim::Pressure, 1.0}},
        {"Pa", {Dim::Pressure, 1e-3}},     {"MPa", {Dim::Pressure, 1e3}},
        {"GPa", {Dim::Pressure, 1e6}},     {"m/s", {Dim::Velocity, 1.0}},
        {"cm/s", {Dim::Velocity, 1e-2}},   {"mm/s", {Dim::Velocity, 1e-3}},
        {"kg/m^3", {Dim::Density, 1.0}},   {"g/cm^3", {Dim::Density, 1e3}},
        {"m/s^2", {Dim::Acceleration, 1.0}}, {"rad/s", {Dim::Frequency, 1.0}},
        {"Hz", {Dim::Frequency, 2.0 * std::numbers::pi}},
    };
    return t;
}

/// A number, or "<number> <unit>" with a unit of the expected dimension.
inline double number(const json& v, const std::string& key, Dim dim) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw ConfigError("key '" + key + "': expected a number");
    const std::string s = v.get<std::string>();
    std::istringstream in(s);
    double x = 0.0;
    std::string unit, rest;
    if (!(in >> x)) throw ConfigError("key '" + key + "': cannot read a number from \"" + s + "\"");
    in >> unit;
    if (in >> rest) throw ConfigError("key '" + key + "': trailing text in \"" + s + "\"");
    if (unit.empty()) return x;
    const auto it = unit_table().find(unit);
    if (it == unit_table().end()) throw ConfigError("key '" + key + "': unknown unit '" + unit + "'");
    if (it->second.dim != dim) {
        const std::string want = dim == Dim::None ? "a dimensionless value" : canonical_unit(dim);
        throw ConfigError("key '" + key + "': unit '" + unit + "' does not match " + want);
    }
    return x * it->second.factor;
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline Face face_from(const std::string& s, const std::string& key) {
    for (int f = 0; f < 6; ++f)
        if (lower(s) == face_name(Face(f))) return Face(f);
    throw ConfigError("key '" + key + "': unknown face '" + s + "'");
}

template <typename E, std::size_t N>
E enum_from(const std::string& s, const std::array<E, N>& values, const std::string& key) {
    for (E e : values)
        if (lower(s) == to_string(e)) return e;
    std::string opts;
    for (E e : values) opts += std::string(opts.empty() ? "" : ", ") + to_string(e);
    throw ConfigError("key '" + key + "': '" + s + "' is not one of " + opts);
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline ordered_json load_to_json(const LoadProtocol& p) {
    ordered_json j;
    j["kind"] = to_string(p.kind);
    j["amplitude"] = p.amplitude;
    j["omega"] = p.omega;
    j["cutoff"] = p.cutoff;
    j["ramp_time"] = p.ramp_time;
    j["start"] = p.start;
    ordered_json t = ordered_json::array();
    for (const auto& [a, b] : p.table) t.push_back({a, b});
    j["table"] = t;
    return j;
}

}  // namespace io

/// Canonical document of a run configuration. Every key accepted by the parser appears.
inline nlohmann::ordered_json serialize_config(const RunConfig& rc) {
    using io::ordered_json;
    const auto& c = rc.scenario;
    ordered_json j;
    j["scenario"] = c.name;
    j["desk_scale"] = c.desk_scale;
    j["grid"] = {{"dimension", c.grid.dimension},
                 {"extents", {c.grid.extents[0], c.grid.extents[1], c.grid.extents[2]}},
                 {"spacing", c.grid.spacing},
                 {"horizon_factor", c.grid.horizon_factor},
                 {"boundary_layer_depth", c.grid.boundary_layer_depth}};
    j["material"] = {{"model", to_string(c.solid.kind)},
                     {"bulk", c.solid.elastic.bulk},
                     {"shear", c.solid.elastic.shear},
                     {"camclay",
                      {{"M", c.solid.camclay.M},
                       {"lambda", c.solid.camclay.lambda},
                       {"kappa", c.solid.camclay.kappa},
                       {"pc0", c.solid.camclay.pc0}}},
                     {"solid_density", c.solid_density},
                     {"porosity", c.porosity}};
    j["fluid"] = {{"conductivity", c.flow.conductivity},
                  {"bulk", c.flow.fluid_bulk},
                  {"density", c.flow.fluid_density}};
    j["model"] = {{"G", c.G},
                  {"influence", to_string(c.influence)},
                  {"gravity", c.gravity},
                  {"storage_term", c.flags.storage_term},
                  {"inertial_flux", c.flags.inertial_flux},
                  {"porosity_update", c.flags.porosity_update},
                  {"geometric_terms", c.flags.geometric_terms}};
    j["initial"] = {{"stress", c.initial_stress}, {"equilibrate", c.equilibrate}};
    j["solver"] = {{"dt", c.newmark.dt},
                   {"t_end", c.t_end},
                   {"beta1", c.newmark.beta1},
                   {"beta2", c.newmark.beta2},
                   {"beta3", c.newmark.beta3},
                   {"rel_tol", c.newton.rel_tol},
                   {"abs_tol", c.newton.abs_tol},
                   {"max_iter", c.newton.max_iter},
                   {"reuse_tangent", c.newton.reuse_tangent},
                   {"refresh_ratio", c.newton.refresh_ratio},
                   {"linear_solver", c.linear_solver},
                   {"stop_displacement", c.stop_displacement}};
    ordered_json b;
    for (int f = 0; f < 6; ++f) {
        const auto& fc = c.boundary.faces[std::size_t(f)];
        b[face_name(Face(f))] = {{"solid", to_string(fc.solid)},
                                 {"fluid", to_string(fc.fluid)},
                                 {"fix_tangential", fc.fix_tangential},
                                 {"from", io::finite_or_null(fc.from)},
                                 {"to", io::finite_or_null(fc.to)},
                                 {"load", io::load_to_json(fc.load)}};
    }
    j["boundary"] = b;
    ordered_json probes = ordered_json::array();
    for (const auto& p : c.probes) {
        ordered_json ch = ordered_json::array();
        for (Channel k : p.channels) ch.push_back(to_string(k));
        probes.push_back({{"name", p.name}, {"at", {p.at[0], p.at[1], p.at[2]}}, {"channels", ch}});
    }
    j["output"] = {{"directory", rc.output_dir},
                   {"probes", probes},
                   {"probe_stride", c.probe_stride},
                   {"snapshot_times", c.snapshot_times},
                   {"monitor_face", c.monitor_face ? ordered_json(face_name(*c.monitor_face))
                                                   : ordered_json(nullptr)}};
    return j;
}

namespace io {

/// Dimension of a numeric leaf, by key path. Array elements share their parent's entry.
inline Dim leaf_dim(const std::string& path, const json& doc) {
    static const std::map<std::string, Dim> dims{
        {"grid.extents", Dim::Length},        {"grid.spacing", Dim::Length},
        {"material.bulk", Dim::Pressure},     {"material.shear", Dim::Pressure},
        {"material.camclay.pc0", Dim::Pressure}, {"material.solid_density", Dim::Density},
        {"fluid.conductivity", Dim::Velocity}, {"fluid.bulk", Dim::Pressure},
        {"fluid.density", Dim::Density},      {"model.gravity", Dim::Acceleration},
        {"initial.stress", Dim::Pressure},    {"solver.dt", Dim::Time},
        {"solver.t_end", Dim::Time},          {"solver.stop_displacement", Dim::Length},
        {"output.probes.at", Dim::Length},    {"output.snapshot_times", Dim::Time},
    };
    if (auto it = dims.find(path); it != dims.end()) return it->second;
    if (path.rfind("boundary.", 0) == 0) {
        const auto tail = path.substr(path.find('.', 9) + 1);
        if (tail == "from" || tail == "to") return Dim::Length;
        if (tail == "load.omega") return Dim::Frequency;
        if (tail == "load.cutoff" || tail == "load.ramp_time" || tail == "load.start") return Dim::Time;
        if (tail == "load.amplitude" || tail == "load.table") {
            const auto face = path.substr(9, path.find('.', 9) - 9);
            const auto& solid = doc["boundary"][face]["solid"];
            return solid.is_string() && lower(solid.get<std::string>()) == "velocity" ? Dim::Velocity
                                                                                     : Dim::Pressure;
        }
    }
    return Dim::None;
}

inline std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

/// Overlays `user` on `def`, rejecting keys absent from `def` and type mismatches.
/// Keys left at their default are reported through `log`.
inline void overlay(json& def, const json& user, const std::string& path, const json& probe_schema,
                    const Log& log) {
    if (!user.is_object()) throw ConfigError("key '" + (path.empty() ? "<root>" : path) + "': expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = join(path, it.key());
        if (!def.contains(it.key())) throw ConfigError("unknown key '" + key + "'");
        json& d = def[it.key()];
        const json& u = it.value();
        if (d.is_object()) {
            overlay(d, u, key, probe_schema, log);
        } else if (key == "output.probes") {
            if (!u.is_array()) throw ConfigError("key '" + key + "': expected an array");
            for (std::size_t k = 0; k < u.size(); ++k) {
                if (!u[k].is_object()) throw ConfigError("key '" + key + "[" + std::to_string(k) + "]': expected an object");
                for (auto e = u[k].begin(); e != u[k].end(); ++e)
                    if (!probe_schema.contains(e.key()))
                        throw ConfigError("unknown key '" + key + "[" + std::to_string(k) + "]." + e.key() + "'");
                if (!u[k].contains("name") || !u[k].contains("at"))
                    throw ConfigError("key '" + key + "[" + std::to_string(k) + "]': 'name' and 'at' are required");
            }
            d = u;
        } else {
            const bool ok = d.is_null() || (d.is_number() && (u.is_number() || u.is_string())) ||
                            (d.is_boolean() && u.is_boolean()) || (d.is_string() && u.is_string()) ||
                            (d.is_array() && u.is_array());
            if (!ok) throw ConfigError("key '" + key + "': expected " + std::string(d.type_name()));
            d = u;
        }
    }
    if (!log) return;
    for (auto it = def.begin(); it != def.end(); ++it) {
        if (user.contains(it.key())) continue;
        log("default " + join(path, it.key()) + " = " + it.value().dump());
    }
}

struct Reader {
    const json& doc;

    const json& at(const std::string& path) const {
        const json* p = &doc;
        std::size_t s = 0;
        while (true) {
            const auto e = path.find('.', s);
            p = &(*p)[path.substr(s, e == std::string::npos ? std::string::npos : e - s)];
            if (e == std::string::npos) break;
            s = e + 1;
        }
        return *p;
    }
    double num(const std::string& path) const { return number(at(path), path, leaf_dim(path, doc)); }
    double positive(const std::string& path) const {
        const double v = num(path);
        if (!(v > 0.0)) throw ConfigError("key '" + path + "' must be positive");
        return v;
    }
    double nonneg(const std::string& path) const {
        const double v = num(path);
        if (!(v >= 0.0)) throw ConfigError("key '" + path + "' must be non-negative");
        return v;
    }
    int integer(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_number_integer()) throw ConfigError("key '" + path + "': expected an integer");
        return v.get<int>();
    }
    bool flag(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_boolean()) throw ConfigError("key '" + path + "': expected true or false");
        return v.get<bool>();
    }
    std::string str(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_string()) throw ConfigError("key '" + path + "': expected a string");
        return v.get<std::string>();
    }
    std::vector<double> nums(const std::string& path) const {
        const json& v = at(path);
        if (!v.is_array()) throw ConfigError("key '" + path + "': expected an array");
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path, leaf_dim(path, doc)));
        return out;
    }
};

inline LoadProtocol load_from(const Reader& r, const std::string& base) {
    LoadProtocol p;
    const std::string kind = r.str(base + ".kind");
    static const std::array kinds{LoadProtocol::Kind::Zero,
                                  LoadProtocol::Kind::Constant,
                                  LoadProtocol::Kind::InstantaneousStep,
                                  LoadProtocol::Kind::HarmonicRaisedCosine,
                                  LoadProtocol::Kind::SineSpike,
                                  LoadProtocol::Kind::VelocityRamp,
                                  LoadProtocol::Kind::CustomTable};
    p.kind = enum_from(kind, kinds, base + ".kind");
    p.amplitude = r.num(base + ".amplitude");
    p.omega = r.num(base + ".omega");
    p.cutoff = r.num(base + ".cutoff");
    p.ramp_time = r.num(base + ".ramp_time");
    p.start = r.num(base + ".start");
    const json& t = r.at(base + ".table");
    if (!t.is_array()) throw ConfigError("key '" + base + ".table': expected an array of [t, value] pairs");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!t[k].is_array() || t[k].size() != 2)
            throw ConfigError("key '" + base + ".table': entry " + std::to_string(k) + " is not a [t, value] pair");
        p.table.emplace_back(number(t[k][0], base + ".table", Dim::Time),
                             number(t[k][1], base + ".table", leaf_dim(base + ".table", r.doc)));
    }
    try {
        p.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + base + "': " + e.what());
    }
    return p;
}

/// Reads a fully populated document (defaults already overlaid).
inline RunConfig from_document(const json& doc) {
    const Reader r{doc};
    RunConfig rc;
    auto& c = rc.scenario;
    c.name = r.str("scenario");
    c.desk_scale = r.flag("desk_scale");

    c.grid.dimension = r.integer("grid.dimension");
    if (c.grid.dimension < 1 || c.grid.dimension > 3) throw ConfigError("key 'grid.dimension' must be 1, 2 or 3");
    const auto ext = r.nums("grid.extents");
    if (ext.size() != 3) throw ConfigError("key 'grid.extents' must have three entries");
    for (int a = 0; a < 3; ++a) c.grid.extents[std::size_t(a)] = ext[std::size_t(a)];
    c.grid.spacing = r.positive("grid.spacing");
    c.grid.horizon_factor = r.num("grid.horizon_factor");
    c.grid.boundary_layer_depth = r.integer("grid.boundary_layer_depth");

    static const std::array models{SolidModel::Kind::Elastic, SolidModel::Kind::CamClay};
    c.solid.kind = enum_from(r.str("material.model"), models, "material.model");
    c.solid.elastic.bulk = r.positive("material.bulk");
    c.solid.elastic.shear = r.positive("material.shear");
    c.solid.camclay.M = r.num("material.camclay.M");
    c.solid.camclay.lambda = r.num("material.camclay.lambda");
    c.solid.camclay.kappa = r.num("material.camclay.kappa");
    c.solid.camclay.pc0 = r.num("material.camclay.pc0");
    c.solid_density = r.positive("material.solid_density");
    c.porosity = r.num("material.porosity");
    if (!(c.porosity >= 0.0 && c.porosity <= 1.0)) throw ConfigError("key 'material.porosity' must lie in [0, 1]");

    c.flow.conductivity = r.positive("fluid.conductivity");
    c.flow.fluid_bulk = r.positive("fluid.bulk");
    c.flow.fluid_density = r.positive("fluid.density");

    c.G = r.nonneg("model.G");
    static const std::array infl{InfluenceFunction::Kind::Unit, InfluenceFunction::Kind::InverseBondLength};
    c.influence = enum_from(r.str("model.influence"), infl, "model.influence");
    c.gravity = r.num("model.gravity");
    c.flags.storage_term = r.flag("model.storage_term");
    c.flags.inertial_flux = r.flag("model.inertial_flux");
    c.flags.porosity_update = r.flag("model.porosity_update");
    c.flags.geometric_terms = r.flag("model.geometric_terms");

    c.initial_stress = r.num("initial.stress");
    c.equilibrate = r.flag("initial.equilibrate");

    c.newmark.dt = r.positive("solver.dt");
    c.t_end = r.nonneg("solver.t_end");
    c.newmark.beta1 = r.num("solver.beta1");
    c.newmark.beta2 = r.num("solver.beta2");
    c.newmark.beta3 = r.num("solver.beta3");
    c.newton.rel_tol = r.positive("solver.rel_tol");
    c.newton.abs_tol = r.positive("solver.abs_tol");
    c.newton.max_iter = r.integer("solver.max_iter");
    c.newton.reuse_tangent = r.flag("solver.reuse_tangent");
    c.newton.refresh_ratio = r.num("solver.refresh_ratio");
    c.linear_solver = r.str("solver.linear_solver");
    c.stop_displacement = r.nonneg("solver.stop_displacement");

    static const std::array solids{SolidCondition::Free, SolidCondition::Fixed, SolidCondition::Roller,
                                   SolidCondition::Traction, SolidCondition::Velocity};
    static const std::array fluids{FluidCondition::Impermeable, FluidCondition::Drained};
    for (int f = 0; f < 6; ++f) {
        const std::string base = std::string("boundary.") + face_name(Face(f));
        auto& fc = c.boundary.faces[std::size_t(f)];
        fc.solid = enum_from(r.str(base + ".solid"), solids, base + ".solid");
        fc.fluid = enum_from(r.str(base + ".fluid"), fluids, base + ".fluid");
        fc.fix_tangential = r.flag(base + ".fix_tangential");
        const json& from = r.at(base + ".from");
        const json& to = r.at(base + ".to");
        fc.from = from.is_null() ? -std::numeric_limits<double>::infinity() : r.num(base + ".from");
        fc.to = to.is_null() ? std::numeric_limits<double>::infinity() : r.num(base + ".to");
        fc.load = load_from(r, base + ".load");
    }

    rc.output_dir = r.str("output.directory");
    const json& probes = r.at("output.probes");
    static const std::array channels{Channel::Displacement, Channel::Pressure, Channel::ShearStrain,
                                     Channel::PlasticVolumeStrain};
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const std::string key = "output.probes[" + std::to_string(k) + "]";
        ProbeSpec p;
        if (!probes[k]["name"].is_string()) throw ConfigError("key '" + key + ".name': expected a string");
        p.name = probes[k]["name"].get<std::string>();
        const json& at = probes[k]["at"];
        if (!at.is_array() || at.empty() || at.size() > 3)
            throw ConfigError("key '" + key + ".at': expected one to three coordinates");
        for (std::size_t a = 0; a < at.size(); ++a) p.at[a] = number(at[a], key + ".at", Dim::Length);
        if (probes[k].contains("channels")) {
            const json& ch = probes[k]["channels"];
            if (!ch.is_array()) throw ConfigError("key '" + key + ".channels': expected an array");
            p.channels.clear();
            for (const auto& e : ch) {
                if (!e.is_string()) throw ConfigError("key '" + key + ".channels': expected strings");
                p.channels.push_back(enum_from(e.get<std::string>(), channels, key + ".channels"));
            }
        }
        c.probes.push_back(std::move(p));
    }
    c.probe_stride = r.integer("output.probe_stride");
    c.snapshot_times = r.nums("output.snapshot_times");
    const json& mf = r.at("output.monitor_face");
    if (mf.is_null()) c.monitor_face.reset();
    else if (mf.is_string()) c.monitor_face = face_from(mf.get<std::string>(), "output.monitor_face");
    else throw ConfigError("key 'output.monitor_face': expected a face name or null");

    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return rc;
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace io

/// Defaults of a scenario as a run configuration.
inline RunConfig default_run_config(const std::string& scenario, bool desk_scale = true) {
    RunConfig rc;
    rc.scenario = default_config(scenario, desk_scale);
    rc.output_dir = "runs/" + scenario;
    return rc;
}

/// Parses configuration text. `desk_scale` overrides the document's own setting.
inline RunConfig parse_config_text(const std::string& text, const Log& log = {},
                                   std::optional<bool> desk_scale = std::nullopt) {
    using io::json;
    json user;
    try {
        user = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        const auto [line, col] = io::line_column(text, e.byte);
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
    if (!user.is_object()) throw ConfigError("configuration must be an object");
    if (!user.contains("scenario") || !user["scenario"].is_string())
        throw ConfigError("key 'scenario' is required and must name a scenario");
    const std::string name = user["scenario"].get<std::string>();
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw ConfigError("key 'scenario': unknown scenario '" + name + "'");
    bool desk = true;
    if (user.contains("desk_scale")) {
        if (!user["desk_scale"].is_boolean()) throw ConfigError("key 'desk_scale': expected true or false");
        desk = user["desk_scale"].get<bool>();
    }
    if (desk_scale) {
        desk = *desk_scale;
        user["desk_scale"] = desk;
    }
    json doc = json::parse(serialize_config(default_run_config(name, desk)).dump());
    const json probe_schema = {{"name", ""}, {"at", json::array()}, {"channels", json::array()}};
    io::overlay(doc, user, "", probe_schema, log);
    RunConfig rc = io::from_document(doc);
    if (log)
        for (const auto& w : rc.scenario.newmark.stability_warnings())
            log("warning: Newmark parameters are not unconditionally stable: " + w);
    return rc;
}

inline RunConfig parse_config(const std::filesystem::path& path, const Log& log = {},
                              std::optional<bool> desk_scale = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), log, desk_scale);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

inline std::string config_hash(const RunConfig& rc) { return hex64(fnv1a(serialize_config(rc).dump())); }

/// %.17g
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct WriteOptions {
    bool deterministic = true;
    int threads = 1;
};

namespace io {

inline void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    out << body;
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

inline std::string probe_table(const RunResult& r, const ProbeSeries& p) {
    std::string s = "time";
    for (const auto& c : p.columns) s += "," + c;
    s += "\n";
    for (std::size_t k = 0; k < r.time.size() && k < p.samples.size(); ++k) {
        s += fmt(r.time[k]);
        for (double v : p.samples[k]) s += "," + fmt(v);
        s += "\n";
    }
    return s;
}

inline std::string monitor_table(const RunResult& r) {
    std::string s = "time,displacement,reaction\n";
    for (std::size_t k = 0; k < r.time.size(); ++k)
        s += fmt(r.time[k]) + "," + fmt(r.monitor_displacement[k]) + "," + fmt(r.reaction[k]) + "\n";
    return s;
}

inline std::string snapshot_table(const RunResult& r, const FieldSnapshot& f) {
    std::string s;
    s += "# scenario " + r.scenario + "\n";
    s += "# step " + std::to_string(f.step) + "\n";
    s += "# time " + fmt(f.time) + "\n";
    s += "# dimension " + std::to_string(f.dimension) + "\n";
    s += "# monitor_displacement " + fmt(f.monitor_displacement) + "\n";
    s += "# units -,m,m,m,m,m,m,kPa,-,-,kPa,-,-\n";
    s += "id,x,y,z,ux,uy,uz,p,eps_s,eps_vp,pc,J,interior\n";
    for (const auto& q : f.records) {
        s += std::to_string(q.id);
        for (double v : q.x) s += "," + fmt(v);
        for (double v : q.u) s += "," + fmt(v);
        s += "," + fmt(q.p) + "," + fmt(q.eps_s) + "," + fmt(q.eps_vp) + "," + fmt(q.pc) + "," + fmt(q.J);
        s += q.interior ? ",1\n" : ",0\n";
    }
    return s;
}

}  // namespace io

/// Writes probe tables, the monitor table, snapshots, the resolved configuration and a
/// manifest into `dir`. Returns the written file names.
inline std::vector<std::string> write_outputs(const RunResult& r, const RunConfig& rc,
                                              const std::filesystem::path& dir,
                                              const WriteOptions& wo = {}) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("config.json", serialize_config(rc).dump(2) + "\n");
    for (const auto& p : r.probes) files.emplace_back("probe_" + p.name + ".csv", io::probe_table(r, p));
    files.emplace_back("monitor.csv", io::monitor_table(r));
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
        files.emplace_back(name, io::snapshot_table(r, r.snapshots[k]));
    }

    nlohmann::ordered_json man;
    man["version"] = kVersion;
    man["scenario"] = r.scenario;
    man["config_hash"] = config_hash(rc);
    man["deterministic"] = wo.deterministic;
    man["threads"] = wo.threads;
    man["complete"] = r.complete;
    man["error"] = r.error;
    man["samples"] = r.time.size();
    man["stats"] = {{"steps", r.stats.steps},
                    {"iterations", r.stats.iterations},
                    {"factorizations", r.stats.factorizations},
                    {"wall_seconds", r.stats.wall_seconds}};
    man["equilibrium"] = {{"iterations", r.equilibrium.iterations},
                          {"initial_norm", r.equilibrium.initial_norm},
                          {"final_norm", r.equilibrium.final_norm}};
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    std::vector<std::string> names;
    for (const auto& [name, body] : files) {
        io::write_file(dir / name, body);
        list.push_back({{"name", name}, {"bytes", body.size()}, {"fnv1a", hex64(fnv1a(body))}});
        names.push_back(name);
    }
    man["files"] = list;
    io::write_file(dir / "manifest.json", man.dump(2) + "\n");
    names.push_back("manifest.json");
    return names;
}

}  // namespace peripore

#endif  // PERIPORE_CLI_IO_HPP
