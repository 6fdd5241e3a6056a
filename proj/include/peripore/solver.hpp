// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file solver.hpp
/// \brief Newmark-Newton time stepping on (delta a, delta pdot) and the finite-difference
/// tangent check.

#ifndef PERIPORE_SOLVER_HPP
#define PERIPORE_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "peripore/balance.hpp"
#include "peripore/linear_solver.hpp"
#include "peripore/tangent.hpp"

namespace peripore {

struct NewtonSettings {
    double rel_tol = 1e-8;  ///< relative to the largest first-iterate residual of the run
    double abs_tol = 1e-10;
    int max_iter = 20;
    bool reuse_tangent = false;  ///< keep the last factorization while iterations contract
    double refresh_ratio = 0.1;  ///< contraction above which a reused tangent is rebuilt

    void validate() const {
        if (!(refresh_ratio > 0.0 && refresh_ratio < 1.0))
            throw ConfigError("Newton refresh_ratio must lie in (0, 1)");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw ConfigError("Newton tolerances must be positive");
        if (max_iter < 1) throw ConfigError("Newton max_iter must be >= 1");
    }
};

struct IterationRecord {
    int iteration = 0;
    double momentum_norm = 0.0;
    double mass_norm = 0.0;
};

struct StepReport {
    Index step = 0;
    double time = 0.0;
    int iterations = 0;
    int factorizations = 0;
    std::vector<IterationRecord> history;
};

using DiagnosticSink = std::function<void(const StepReport&)>;

/// Norms over unconstrained rows and the largest constraint violation in primary units.
template <int D>
struct ResidualNorms {
    double momentum = 0.0;
    double mass = 0.0;
    double constraint = 0.0;
};

template <int D>
ResidualNorms<D> residual_norms(const Model<D>& m, const ResidualVector<D>& r,
                                const NewmarkParams& nm) {
    ResidualNorms<D> n;
    double su = 0.0, sp = 0.0;
    for (Index k = 0; k < r.values.size(); ++k) {
        if (m.constrained(k)) continue;
        const double v = r.values[k];
        if (k % (D + 1) == D) sp += v * v;
        else su += v * v;
    }
    n.momentum = std::sqrt(su);
    n.mass = std::sqrt(sp);
    for (const auto& c : m.constraints) {
        const double v = r.values[m.points[c.point].dof(c.component)];
        const double scale = c.kind == ConstraintKind::Displacement ? nm.c_u()
                             : c.kind == ConstraintKind::Velocity   ? nm.c_v()
                                                                    : nm.c_p();
        n.constraint = std::max(n.constraint, std::abs(v) * scale);
    }
    return n;
}

/// Owns the tangent pattern and the factorization workspace of one model.
template <int D>
class Integrator {
public:
    Integrator(const Model<D>& m, NewmarkParams nm, NewtonSettings ns,
               const std::string& linear_solver = "auto")
        : model_(m), nm_(nm), ns_(ns), assembler_(m), solver_(make_linear_solver(linear_solver, m.dofs())) {
        nm_.validate();
        ns_.validate();
        A_ = assembler_.pattern();
    }

    const NewmarkParams& newmark() const { return nm_; }
    const NewtonSettings& newton() const { return ns_; }
    const ResidualVector<D>& last_residual() const { return last_; }
    const Evaluation<D>& last_evaluation() const { return last_eval_; }
    const SparseMatrix& matrix() const { return A_; }
    const TangentAssembler<D>& assembler() const { return assembler_; }
    std::string solver_name() const { return solver_->name(); }

    void set_sink(DiagnosticSink sink) { sink_ = std::move(sink); }

    /// Advances `s` by one step. On failure `s` is left unchanged.
    StepReport advance(State<D>& s) {
        State<D> trial = newmark_predict(s, nm_);
        StepReport rep;
        rep.step = ++steps_;
        rep.time = trial.time;
        double r0u = 0.0, r0p = 0.0;
        for (int it = 0;; ++it) {
            Evaluation<D> ev = evaluate(model_, trial);
            ResidualVector<D> r = assemble_residuals(model_, trial, ev, nm_);
            const auto n = residual_norms(model_, r, nm_);
            rep.history.push_back({it, n.momentum, n.mass});
            if (it == 0) {
                ref_u_ = std::max(ref_u_, n.momentum);
                ref_p_ = std::max(ref_p_, n.mass);
                r0u = ref_u_;
                r0p = ref_p_;
            }
            const bool ok = n.momentum <= std::max(ns_.abs_tol, ns_.rel_tol * r0u) &&
                            n.mass <= std::max(ns_.abs_tol, ns_.rel_tol * r0p) &&
                            n.constraint <= kConstraintTol;
            if (ok) {
                rep.iterations = it;
                for (Index i = 0; i < model_.size(); ++i) trial.history[i] = ev[i].response.state;
                s = std::move(trial);
                last_ = std::move(r);
                last_eval_ = std::move(ev);
                if (sink_) sink_(rep);
                return rep;
            }
            if (it >= ns_.max_iter) {
                if (sink_) sink_(rep);
                throw NonConvergence(it, std::max(n.momentum, n.mass));
            }
            bool refresh = !ns_.reuse_tangent || !factorized_;
            if (it > 0 && !refresh) {
                const auto& prev = rep.history[Index(it - 1)];
                // Only blocks that are still above their tolerance count.
                auto ratio = [](double now, double before, double tol) {
                    return now > tol && before > 0.0 ? now / before : 0.0;
                };
                const double tu = std::max(ns_.abs_tol, ns_.rel_tol * r0u);
                const double tp = std::max(ns_.abs_tol, ns_.rel_tol * r0p);
                refresh = std::max(ratio(n.momentum, prev.momentum_norm, tu),
                                   ratio(n.mass, prev.mass_norm, tp)) > ns_.refresh_ratio;
            }
            if (refresh) ++rep.factorizations;
            const Eigen::VectorXd dx = newton_step(trial, ev, r, refresh);
            newmark_correct(trial, std::span<const double>(dx.data(), Index(dx.size())), nm_);
        }
    }

    /// Solves A dx = -r, with A assembled at the iterate unless `refresh` is false and a
    /// factorization is already held.
    Eigen::VectorXd newton_step(const State<D>& trial, const Evaluation<D>& ev,
                                const ResidualVector<D>& r, bool refresh = true) {
        if (refresh || !factorized_) {
            assembler_.assemble(model_, trial, ev, nm_, A_);
            if (!analyzed_) {
                solver_->analyze(A_);
                analyzed_ = true;
            }
            solver_->factorize(A_);
            factorized_ = true;
        }
        Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(r.values.data(), long(r.values.size()));
        Eigen::VectorXd dx = solver_->solve(rhs);
        if (!dx.allFinite()) throw SolveFailure("linear solve produced non-finite values");
        return dx;
    }

    static constexpr double kConstraintTol = 1e-12;

private:
    const Model<D>& model_;
    NewmarkParams nm_;
    NewtonSettings ns_;
    TangentAssembler<D> assembler_;
    std::unique_ptr<LinearSolver> solver_;
    SparseMatrix A_;
    bool analyzed_ = false;
    bool factorized_ = false;
    double ref_u_ = 0.0, ref_p_ = 0.0;
    Index steps_ = 0;
    ResidualVector<D> last_;
    Evaluation<D> last_eval_;
    DiagnosticSink sink_;
};

template <int D>
StepReport advance_step(const Model<D>& m, State<D>& s, const NewmarkParams& nm,
                        const NewtonSettings& ns) {
    Integrator<D> integ(m, nm, ns);
    return integ.advance(s);
}

struct FdBlockError {
    double max_abs_diff = 0.0;
    double max_abs_ref = 0.0;
    double relative() const { return max_abs_ref > 0.0 ? max_abs_diff / max_abs_ref : max_abs_diff; }
};

struct FdReport {
    FdBlockError uu, up, pu, pp;
    double max_relative() const {
        return std::max({uu.relative(), up.relative(), pu.relative(), pp.relative()});
    }
};

/// Central-difference Jacobian of the residual at trial = predict(base) + correct(delta),
/// compared blockwise with the analytic tangent. Step sizes are chosen so that the
/// perturbed displacement is eps * dx and the perturbed pressure eps * p_scale.
template <int D>
FdReport fd_tangent_check(const Model<D>& m, const State<D>& base, std::span<const double> delta,
                          const NewmarkParams& nm, double eps = 1e-6, double p_scale = 1.0) {
    auto state_at = [&](const std::vector<double>& d) {
        State<D> t = newmark_predict(base, nm);
        newmark_correct(t, std::span<const double>(d), nm);
        return t;
    };
    std::vector<double> d0(delta.begin(), delta.end());
    const State<D> s0 = state_at(d0);
    const Evaluation<D> ev0 = evaluate(m, s0);
    TangentAssembler<D> ta(m);
    SparseMatrix A = ta.pattern();
    ta.assemble(m, s0, ev0, nm, A);
    const Eigen::MatrixXd Ad(A);

    const Index n = m.dofs();
    const double hu = eps * m.dx() / nm.c_u();
    const double hp = eps * p_scale / nm.c_p();
    FdReport rep;
    for (Index k = 0; k < n; ++k) {
        const bool kp = k % (D + 1) == D;
        const double h = kp ? hp : hu;
        auto dp = d0, dm = d0;
        dp[k] += h;
        dm[k] -= h;
        const auto rp = assemble_residuals(m, state_at(dp), nm).values;
        const auto rm = assemble_residuals(m, state_at(dm), nm).values;
        for (Index row = 0; row < n; ++row) {
            const double fd = (rp[row] - rm[row]) / (2.0 * h);
            const double an = Ad(long(row), long(k));
            const bool rpres = row % (D + 1) == D;
            FdBlockError& blk = rpres ? (kp ? rep.pp : rep.pu) : (kp ? rep.up : rep.uu);
            blk.max_abs_diff = std::max(blk.max_abs_diff, std::abs(fd - an));
            blk.max_abs_ref = std::max(blk.max_abs_ref, std::abs(an));
        }
    }
    return rep;
}

}  // namespace peripore

#endif  // PERIPORE_SOLVER_HPP
