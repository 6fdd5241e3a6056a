// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file load_protocol.hpp
/// \brief Scalar time histories used for tractions, prescribed velocities and pressures.

#ifndef PERIPORE_LOAD_PROTOCOL_HPP
#define PERIPORE_LOAD_PROTOCOL_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "peripore/core.hpp"

namespace peripore {

struct LoadProtocol {
    enum class Kind {
        Zero,
        Constant,
        InstantaneousStep,     ///< amplitude for t >= start
        HarmonicRaisedCosine,  ///< amplitude * (1 - cos(omega t))
        SineSpike,             ///< amplitude * sin(omega t) for t <= cutoff, else 0
        VelocityRamp,          ///< amplitude * min(t / ramp_time, 1)
        CustomTable            ///< piecewise linear in (t, value), held constant outside
    };

    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    double omega = 0.0;      ///< angular frequency [rad/s]
    double cutoff = 0.0;     ///< [s]
    double ramp_time = 0.0;  ///< [s]
    double start = 0.0;      ///< [s]
    std::vector<std::pair<double, double>> table;

    static LoadProtocol zero() { return {}; }
    static LoadProtocol constant(double a) {
        LoadProtocol p;
        p.kind = Kind::Constant;
        p.amplitude = a;
        return p;
    }
    static LoadProtocol step(double a, double t0 = 0.0) {
        LoadProtocol p;
        p.kind = Kind::InstantaneousStep;
        p.amplitude = a;
        p.start = t0;
        return p;
    }
    static LoadProtocol harmonic(double a, double w) {
        LoadProtocol p;
        p.kind = Kind::HarmonicRaisedCosine;
        p.amplitude = a;
        p.omega = w;
        return p;
    }
    static LoadProtocol sine_spike(double a, double w, double t_cut) {
        LoadProtocol p;
        p.kind = Kind::SineSpike;
        p.amplitude = a;
        p.omega = w;
        p.cutoff = t_cut;
        return p;
    }
    static LoadProtocol velocity_ramp(double rate, double t_ramp) {
        LoadProtocol p;
        p.kind = Kind::VelocityRamp;
        p.amplitude = rate;
        p.ramp_time = t_ramp;
        return p;
    }
    static LoadProtocol custom(std::vector<std::pair<double, double>> pts) {
        LoadProtocol p;
        p.kind = Kind::CustomTable;
        p.table = std::move(pts);
        p.validate();
        return p;
    }

    void validate() const {
        if (kind == Kind::VelocityRamp && ramp_time < 0.0)
            throw ConfigError("velocity ramp time must be non-negative");
        if (kind == Kind::SineSpike && cutoff < 0.0)
            throw ConfigError("sine spike cutoff must be non-negative");
        if (kind == Kind::CustomTable) {
            if (table.empty()) throw ConfigError("custom load table is empty");
            for (std::size_t k = 1; k < table.size(); ++k)
                if (!(table[k].first > table[k - 1].first))
                    throw ConfigError("custom load table times must increase strictly");
        }
    }

    double value(double t) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return amplitude;
            case Kind::InstantaneousStep: return t >= start ? amplitude : 0.0;
            case Kind::HarmonicRaisedCosine: return amplitude * (1.0 - std::cos(omega * t));
            case Kind::SineSpike: return t <= cutoff ? amplitude * std::sin(omega * t) : 0.0;
            case Kind::VelocityRamp:
                return ramp_time > 0.0 ? amplitude * std::min(t / ramp_time, 1.0) : amplitude;
            case Kind::CustomTable: return table_value(t);
        }
        return 0.0;
    }

    /// Integral of value() over [0, t].
    double integral(double t) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return amplitude * t;
            case Kind::InstantaneousStep: return t > start ? amplitude * (t - start) : 0.0;
            case Kind::HarmonicRaisedCosine:
                return omega != 0.0 ? amplitude * (t - std::sin(omega * t) / omega) : 0.0;
            case Kind::SineSpike: {
                const double te = std::min(t, cutoff);
                return omega != 0.0 ? amplitude * (1.0 - std::cos(omega * te)) / omega : 0.0;
            }
            case Kind::VelocityRamp: {
                if (ramp_time <= 0.0) return amplitude * t;
                if (t <= ramp_time) return 0.5 * amplitude * t * t / ramp_time;
                return amplitude * (t - 0.5 * ramp_time);
            }
            case Kind::CustomTable: return table_integral(t);
        }
        return 0.0;
    }

private:
    double table_value(double t) const {
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), t,
                                   [](double v, const auto& e) { return v < e.first; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        return a.second + (b.second - a.second) * (t - a.first) / (b.first - a.first);
    }

    double table_integral(double t) const {
        if (t <= 0.0) return 0.0;
        double acc = 0.0, t0 = 0.0;
        double v0 = table_value(0.0);
        for (const auto& [tk, vk] : table) {
            if (tk <= t0) continue;
            const double t1 = std::min(tk, t);
            const double v1 = table_value(t1);
            acc += 0.5 * (v0 + v1) * (t1 - t0);
            t0 = t1;
            v0 = v1;
            if (t1 >= t) return acc;
        }
        return acc + v0 * (t - t0);
    }
};

inline const char* to_string(LoadProtocol::Kind k) {
    switch (k) {
        case LoadProtocol::Kind::Zero: return "zero";
        case LoadProtocol::Kind::Constant: return "constant";
        case LoadProtocol::Kind::InstantaneousStep: return "instantaneous_step";
        case LoadProtocol::Kind::HarmonicRaisedCosine: return "harmonic_raised_cosine";
        case LoadProtocol::Kind::SineSpike: return "sine_spike";
        case LoadProtocol::Kind::VelocityRamp: return "velocity_ramp";
        case LoadProtocol::Kind::CustomTable: return "custom_table";
    }
    return "zero";
}

}  // namespace peripore

#endif  // PERIPORE_LOAD_PROTOCOL_HPP
