// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file linear_solver.hpp
/// \brief Sparse direct solvers behind a small interface. The symbolic analysis is done
/// once per pattern and reused by every numeric factorization.

#ifndef PERIPORE_LINEAR_SOLVER_HPP
#define PERIPORE_LINEAR_SOLVER_HPP

#include <memory>
#include <string>

#include <Eigen/SparseLU>
#ifdef PERIPORE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "peripore/tangent.hpp"

namespace peripore {

class LinearSolver {
public:
    virtual ~LinearSolver() = default;
    virtual void analyze(const SparseMatrix& A) = 0;
    virtual void factorize(const SparseMatrix& A) = 0;
    virtual Eigen::VectorXd solve(const Eigen::VectorXd& b) = 0;
    virtual std::string name() const = 0;
};

class SparseLUSolver final : public LinearSolver {
public:
    void analyze(const SparseMatrix& A) override { lu_.analyzePattern(A); }
    void factorize(const SparseMatrix& A) override {
        lu_.factorize(A);
        if (lu_.info() != Eigen::Success) throw SolveFailure("sparse LU factorization failed: " + lu_.lastErrorMessage());
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) override {
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) throw SolveFailure("sparse LU solve failed");
        return x;
    }
    std::string name() const override { return "sparselu"; }

private:
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

#ifdef PERIPORE_HAVE_UMFPACK
class UmfpackSolver final : public LinearSolver {
public:
    UmfpackSolver() {
        // The tangent pattern is structurally symmetric.
        lu_.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
        lu_.umfpackControl()(UMFPACK_IRSTEP) = 0;
    }
    void analyze(const SparseMatrix& A) override { lu_.analyzePattern(A); }
    void factorize(const SparseMatrix& A) override {
        lu_.factorize(A);
        if (lu_.info() != Eigen::Success) throw SolveFailure("UMFPACK factorization failed");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) override {
        Eigen::VectorXd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) throw SolveFailure("UMFPACK solve failed");
        return x;
    }
    std::string name() const override { return "umfpack"; }

private:
    Eigen::UmfPackLU<SparseMatrix> lu_;
};
#endif

inline bool umfpack_available() {
#ifdef PERIPORE_HAVE_UMFPACK
    return true;
#else
    return false;
#endif
}

/// "auto" picks SparseLU for small systems and UMFPACK (when built in) above `kAutoUmfpackDofs`.
inline constexpr Index kAutoUmfpackDofs = 5000;

inline std::unique_ptr<LinearSolver> make_linear_solver(const std::string& kind = "auto",
                                                        Index dofs = 0) {
#ifdef PERIPORE_HAVE_UMFPACK
    if (kind == "umfpack" || (kind == "auto" && dofs > kAutoUmfpackDofs))
        return std::make_unique<UmfpackSolver>();
#endif
    if (kind == "auto" || kind == "sparselu") return std::make_unique<SparseLUSolver>();
    throw ConfigError("unknown or unavailable linear solver '" + kind + "'");
}

}  // namespace peripore

#endif  // PERIPORE_LINEAR_SOLVER_HPP
