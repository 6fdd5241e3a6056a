// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file core.hpp
/// \brief Fixed-size tensor aliases and the error hierarchy shared by every module.

#ifndef PERIPORE_CORE_HPP
#define PERIPORE_CORE_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace peripore {

inline constexpr const char* kVersion = "0.1.0";

using Index = std::size_t;

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
using Mat = Eigen::Matrix<double, D, D>;

using Vec3 = Vec<3>;
using Mat3 = Mat<3>;

/// Fourth-order tensor stored as a 9x9 matrix, entry (3*i+j, 3*k+l) = A_ijkl.
using Tensor4 = Eigen::Matrix<double, 9, 9>;

constexpr int tensor_index(int i, int j) { return 3 * i + j; }

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridError : public Error {
public:
    using Error::Error;
};

/// Raised when a family's shape tensor is (numerically) rank deficient.
class SingularShapeTensor : public Error {
public:
    SingularShapeTensor(Index point, double rcond)
        : Error("singular shape tensor at point " + std::to_string(point) +
                " (reciprocal condition " + std::to_string(rcond) + ")"),
          point_(point), rcond_(rcond) {}
    Index point() const noexcept { return point_; }
    double rcond() const noexcept { return rcond_; }

private:
    Index point_;
    double rcond_;
};

/// det F <= 0 at a material point.
class InvertedElement : public Error {
public:
    InvertedElement(Index point, double jacobian)
        : Error("non-positive Jacobian " + std::to_string(jacobian) + " at point " +
                std::to_string(point)),
          point_(point), jacobian_(jacobian) {}
    Index point() const noexcept { return point_; }
    double jacobian() const noexcept { return jacobian_; }

private:
    Index point_;
    double jacobian_;
};

class ReturnMapFailure : public Error {
public:
    ReturnMapFailure(Index point, double p_trial, double q_trial, double pc)
        : Error("return mapping did not converge at point " + std::to_string(point) +
                " (p_trial=" + std::to_string(p_trial) + ", q_trial=" + std::to_string(q_trial) +
                ", pc=" + std::to_string(pc) + ")"),
          point_(point), p_trial_(p_trial), q_trial_(q_trial), pc_(pc) {}
    Index point() const noexcept { return point_; }
    double p_trial() const noexcept { return p_trial_; }
    double q_trial() const noexcept { return q_trial_; }

private:
    Index point_;
    double p_trial_, q_trial_, pc_;
};

class NonFiniteResidual : public Error {
public:
    explicit NonFiniteResidual(Index point)
        : Error("non-finite residual at point " + std::to_string(point)), point_(point) {}
    Index point() const noexcept { return point_; }

private:
    Index point_;
};

class SolveFailure : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double residual)
        : Error("Newton iteration did not converge after " + std::to_string(iterations) +
                " iterations (residual " + format_residual(residual) + ")"),
          iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    static std::string format_residual(double r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", r);
        return buf;
    }
    int iterations_;
    double residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace peripore

#endif  // PERIPORE_CORE_HPP
