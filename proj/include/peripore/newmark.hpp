// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file newmark.hpp
/// \brief Newmark parameters, stability check and the predictor/corrector updates.

#ifndef PERIPORE_NEWMARK_HPP
#define PERIPORE_NEWMARK_HPP

#include <span>
#include <string>
#include <vector>

#include "peripore/constitutive.hpp"
#include "peripore/core.hpp"

namespace peripore {

struct NewmarkParams {
    double beta1 = 0.605;
    double beta2 = 0.6;
    double beta3 = 0.6;
    double dt = 1e-3;

    double c_u() const { return 0.5 * beta1 * dt * dt; }  ///< du / d(delta a)
    double c_v() const { return beta2 * dt; }             ///< dv / d(delta a)
    double c_p() const { return beta3 * dt; }             ///< dp / d(delta pdot)

    /// Human-readable violations of beta1 >= beta2 >= 1/2, beta3 >= 1/2; empty when stable.
    std::vector<std::string> stability_warnings() const {
        std::vector<std::string> w;
        if (beta2 < 0.5) w.push_back("beta2 = " + std::to_string(beta2) + " < 1/2");
        if (beta1 < beta2)
            w.push_back("beta1 = " + std::to_string(beta1) + " < beta2 = " + std::to_string(beta2));
        if (beta3 < 0.5) w.push_back("beta3 = " + std::to_string(beta3) + " < 1/2");
        return w;
    }
    bool unconditionally_stable() const { return stability_warnings().empty(); }

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("time step must be positive");
        for (double b : {beta1, beta2, beta3})
            if (!(b > 0.0 && b <= 1.0)) throw ConfigError("Newmark parameters must lie in (0, 1]");
    }
};

template <int D>
struct State {
    double time = 0.0;
    std::vector<Vec<D>> u, v, a;
    std::vector<double> p, pdot;
    std::vector<ConstitutiveState> history;  ///< committed constitutive history

    Index size() const { return u.size(); }

    static State zeros(Index n) {
        State s;
        s.u.assign(n, Vec<D>::Zero());
        s.v.assign(n, Vec<D>::Zero());
        s.a.assign(n, Vec<D>::Zero());
        s.p.assign(n, 0.0);
        s.pdot.assign(n, 0.0);
        s.history.assign(n, ConstitutiveState{});
        return s;
    }
};

/// Trial state at t + dt with zero increments.
template <int D>
State<D> newmark_predict(const State<D>& s, const NewmarkParams& nm) {
    State<D> t = s;
    const double dt = nm.dt;
    t.time = s.time + dt;
    for (Index i = 0; i < s.size(); ++i) {
        t.u[i] = s.u[i] + dt * s.v[i] + 0.5 * dt * dt * s.a[i];
        t.v[i] = s.v[i] + dt * s.a[i];
        t.p[i] = s.p[i] + dt * s.pdot[i];
    }
    return t;
}

/// Adds increments to a trial state. `delta` is interleaved per point as
/// [da_0 .. da_{D-1}, dpdot]. Linear in `delta`, so repeated corrections accumulate.
template <int D>
void newmark_correct(State<D>& s, std::span<const double> delta, const NewmarkParams& nm) {
    const double cu = nm.c_u(), cv = nm.c_v(), cp = nm.c_p();
    for (Index i = 0; i < s.size(); ++i) {
        const double* d = delta.data() + i * (D + 1);
        for (int c = 0; c < D; ++c) {
            s.a[i][c] += d[c];
            s.v[i][c] += cv * d[c];
            s.u[i][c] += cu * d[c];
        }
        s.pdot[i] += d[D];
        s.p[i] += cp * d[D];
    }
}

}  // namespace peripore

#endif  // PERIPORE_NEWMARK_HPP
