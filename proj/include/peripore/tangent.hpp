// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file tangent.hpp
/// \brief Monolithic tangent of the residual with respect to (delta a, delta pdot).
///
/// Row i couples to every point reachable in two family hops, because T_i gathers
/// P_k from each neighbor k and P_k depends on all of k's neighbors through F_k.

#ifndef PERIPORE_TANGENT_HPP
#define PERIPORE_TANGENT_HPP

#include <algorithm>
#include <vector>

#include <Eigen/Sparse>

#include "peripore/balance.hpp"

namespace peripore {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// dP/dF contracted as G[a][c] = sum_{b,d} A_abcd x_b y_d, split so x is applied once.
template <int D>
struct StressDerivative {
    double J;
    Mat<D> SFt;    ///< sigma F^-T
    Mat<D> FinvT;
    bool geometric;
    Eigen::Matrix<double, D * D, D * D> Dsym;  ///< d sigma_ae / d F_cd, row a*D+e, col c*D+d

    StressDerivative(const PointEval<D>& e, bool geometric_terms = true)
        : J(e.Jp), SFt(e.sigma * e.Fp_invT), FinvT(e.Fp_invT), geometric(geometric_terms) {
        const Tensor4& T = e.response.tangent;
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b)
                for (int c = 0; c < D; ++c)
                    for (int d = 0; d < D; ++d)
                        Dsym(a * D + b, c * D + d) = 0.5 * (T(tensor_index(a, b), tensor_index(c, d)) +
                                                            T(tensor_index(a, b), tensor_index(d, c)));
    }

    /// H[c*D+d](a) = sum_b A_abcd x_b.
    Eigen::Matrix<double, D, D * D> partial(const Vec<D>& x) const {
        Eigen::Matrix<double, D, D * D> H;
        const Vec<D> SFx = SFt * x;
        const Vec<D> z = FinvT * x;
        for (int c = 0; c < D; ++c)
            for (int d = 0; d < D; ++d) {
                for (int a = 0; a < D; ++a) {
                    double v = geometric ? J * SFx[a] * FinvT(c, d) - J * SFt(a, d) * z[c] : 0.0;
                    for (int e2 = 0; e2 < D; ++e2) v += J * Dsym(a * D + e2, c * D + d) * z[e2];
                    H(a, c * D + d) = v;
                }
            }
        return H;
    }

    static Mat<D> apply(const Eigen::Matrix<double, D, D * D>& H, const Vec<D>& y) {
        Mat<D> G = Mat<D>::Zero();
        for (int c = 0; c < D; ++c)
            for (int d = 0; d < D; ++d) G.col(c) += H.col(c * D + d) * y[d];
        return G;
    }
};

template <int D>
class TangentAssembler {
public:
    static constexpr int kB = D + 1;

    explicit TangentAssembler(const Model<D>& m) { build_pattern(m); }

    const SparseMatrix& pattern() const { return pattern_; }
    Index row_width(Index i) const { return col_off_[i + 1] - col_off_[i]; }

    /// Fills `A` (which must share the pattern) at the iterate `s`.
    void assemble(const Model<D>& m, const State<D>& s, const Evaluation<D>& ev,
                  const NewmarkParams& nm, SparseMatrix& A) const {
        if (A.nonZeros() != pattern_.nonZeros() || A.rows() != pattern_.rows()) A = pattern_;
        double* vals = A.valuePtr();
        std::fill(vals, vals + A.nonZeros(), 0.0);
        std::vector<StressDerivative<D>> sd;
        sd.reserve(m.size());
        for (Index k = 0; k < m.size(); ++k) sd.emplace_back(ev[k], m.flags.geometric_terms);

        parallel_for(m.size(), [&](Index i) {
            const Index n = row_width(i);
            std::vector<double> blk(n * kB * kB, 0.0);
            assemble_row(m, s, ev, sd, nm, i, blk);
            const Index* slot = slots_.data() + col_off_[i] * kB * kB;
            for (Index q = 0; q < n * kB * kB; ++q) vals[slot[q]] = blk[q];
        });
    }

private:
    std::vector<Index> col_off_;
    std::vector<Index> cols_;
    std::vector<Index> slots_;
    SparseMatrix pattern_;

    Index local(Index i, Index m) const {
        auto first = cols_.begin() + long(col_off_[i]);
        auto last = cols_.begin() + long(col_off_[i + 1]);
        return Index(std::lower_bound(first, last, m) - first);
    }

    void build_pattern(const Model<D>& m) {
        const auto& fam = m.families;
        const Index N = m.size();
        col_off_.assign(N + 1, 0);
        std::vector<std::vector<Index>> rows(N);
        parallel_for(N, [&](Index i) {
            auto& r = rows[i];
            auto add_hop = [&](Index k) {
                r.push_back(k);
                for (Index b = fam.begin(k); b < fam.end(k); ++b) r.push_back(fam.bonds[b].j);
            };
            add_hop(i);
            for (Index b = fam.begin(i); b < fam.end(i); ++b) add_hop(fam.bonds[b].j);
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
        });
        for (Index i = 0; i < N; ++i) col_off_[i + 1] = col_off_[i] + rows[i].size();
        cols_.reserve(col_off_[N]);
        for (auto& r : rows) cols_.insert(cols_.end(), r.begin(), r.end());

        // Column counts, then fill a compressed column-major structure directly.
        const Index ndof = m.dofs();
        std::vector<int> nnz_col(ndof, 0);
        for (Index i = 0; i < N; ++i)
            for (Index q = col_off_[i]; q < col_off_[i + 1]; ++q)
                for (int c = 0; c < kB; ++c) nnz_col[cols_[q] * kB + Index(c)] += kB;
        pattern_ = SparseMatrix(long(ndof), long(ndof));
        pattern_.reserve(nnz_col);
        // Rows are visited in ascending order, so inner indices come out sorted.
        for (Index i = 0; i < N; ++i)
            for (Index q = col_off_[i]; q < col_off_[i + 1]; ++q)
                for (int r = 0; r < kB; ++r)
                    for (int c = 0; c < kB; ++c)
                        pattern_.insert(long(i * kB + Index(r)), long(cols_[q] * kB + Index(c))) = 0.0;
        pattern_.makeCompressed();

        slots_.resize(col_off_[N] * kB * kB);
        const int* outer = pattern_.outerIndexPtr();
        const int* inner = pattern_.innerIndexPtr();
        parallel_for(N, [&](Index i) {
            for (Index q = col_off_[i]; q < col_off_[i + 1]; ++q) {
                const Index lq = q - col_off_[i];
                for (int r = 0; r < kB; ++r)
                    for (int c = 0; c < kB; ++c) {
                        const Index col = cols_[q] * kB + Index(c);
                        const int row = int(i * kB + Index(r));
                        const int* lo = inner + outer[col];
                        const int* hi = inner + outer[col + 1];
                        const int* it = std::lower_bound(lo, hi, row);
                        slots_[(col_off_[i] + lq) * kB * kB + Index(r * kB + c)] = Index(it - inner);
                    }
            }
        });
    }

    /// Scalar derivative S_in of sum_j [c_ij R_ij - c_ji R_ji] V_j with respect to the
    /// field at n, for R_kj = f_j - f_k - grad_k f . xi_kj (shared by solid and fluid).
    template <typename Coef>
    void stabilization_row(const Model<D>& m, Index i, Coef coef, std::vector<double>& S) const {
        const auto& fam = m.families;
        const auto& B = m.kernels.B;
        auto add_grad = [&](Index k, const Vec<D>& w, double scale) {
            S[local(i, k)] += scale * w.dot(m.kernels.B_self[k]);
            for (Index b = fam.begin(k); b < fam.end(k); ++b)
                S[local(i, fam.bonds[b].j)] += scale * w.dot(B[b]);
        };
        Vec<D> si = Vec<D>::Zero();
        const Index li = local(i, i);
        for (Index b = fam.begin(i); b < fam.end(i); ++b) {
            const auto& bd = fam.bonds[b];
            const double c = coef(i, b) * bd.volume;
            S[local(i, bd.j)] += c;
            S[li] -= c;
            si += c * bd.xi;
        }
        add_grad(i, si, -1.0);
        for (Index b = fam.begin(i); b < fam.end(i); ++b) {
            const auto& bd = fam.bonds[b];
            const Index j = bd.j, rb = fam.reverse[b];
            const double c = coef(j, rb) * bd.volume;
            S[li] -= c;
            S[local(i, j)] += c;
            add_grad(j, fam.bonds[rb].xi, c);
        }
    }

    void assemble_row(const Model<D>& m, const State<D>& s, const Evaluation<D>& ev,
                      const std::vector<StressDerivative<D>>& sd, const NewmarkParams& nm, Index i,
                      std::vector<double>& blk) const {
        const auto& fam = m.families;
        const auto& kt = m.kernels;
        const double cu = nm.c_u(), cv = nm.c_v(), cp = nm.c_p();
        const double Vi = m.points[i].volume;
        const double kw = m.flow.conductivity;
        auto at = [&](Index l, int r, int c) -> double& { return blk[(l * kB + Index(r)) * kB + Index(c)]; };

        // Sum over k in {i} U N(i) with x = B_ki and weight V_k / V_i.
        auto for_each_source = [&](auto&& fn) {
            fn(i, kt.B_self[i], 1.0);
            for (Index b = fam.begin(i); b < fam.end(i); ++b)
                fn(fam.bonds[b].j, kt.B[fam.reverse[b]], fam.bonds[b].volume / Vi);
        };
        // Sum over m in {k} U N(k) with y = B_km.
        auto for_each_target = [&](Index k, auto&& fn) {
            fn(k, kt.B_self[k]);
            for (Index b = fam.begin(k); b < fam.end(k); ++b) fn(fam.bonds[b].j, kt.B[b]);
        };

        for_each_source([&](Index k, const Vec<D>& x, double wk) {
            const auto H = sd[k].partial(x);
            for_each_target(k, [&](Index mm, const Vec<D>& y) {
                const Mat<D> G = StressDerivative<D>::apply(H, y);
                const Index l = local(i, mm);
                for (int a = 0; a < D; ++a)
                    for (int c = 0; c < D; ++c) at(l, a, c) += cu * wk * G(a, c);
                at(l, D, D) += cp * kw * wk * y.dot(x);
            });
            const Index lk = local(i, k);
            const Vec<D> pc = -cp * wk * ev[k].Jp * (ev[k].Fp_invT * x);
            for (int a = 0; a < D; ++a) at(lk, a, D) += pc[a];
            if (m.flags.inertial_flux)
                for (int c = 0; c < D; ++c) at(lk, D, c) += wk * kw * x[c];
        });

        const Index li = local(i, i);
        for (int a = 0; a < D; ++a) at(li, a, a) += ev[i].rho;
        if (m.flags.storage_term) at(li, D, D) += ev[i].phi / m.flow.fluid_bulk;

        for_each_target(i, [&](Index mm, const Vec<D>& y) {
            const Index l = local(i, mm);
            for (int c = 0; c < D; ++c) at(l, D, c) += cv * y[c];
        });

        if (m.flags.porosity_update) {
            const double dphi = (1.0 - m.porosity) / ev[i].J;
            const Vec<D> acc = s.a[i] - m.gravity;
            const double drho = kDensityScale * (m.flow.fluid_density - m.solid_density);
            for_each_target(i, [&](Index mm, const Vec<D>& y) {
                const Vec<D> g = dphi * (ev[i].F_invT * y);
                const Index l = local(i, mm);
                for (int a = 0; a < D; ++a)
                    for (int c = 0; c < D; ++c) at(l, a, c) += cu * drho * acc[a] * g[c];
                if (m.flags.storage_term)
                    for (int c = 0; c < D; ++c) at(l, D, c) += cu * s.pdot[i] / m.flow.fluid_bulk * g[c];
            });
        }

        if (m.stab.G != 0.0) {
            const Index n = row_width(i);
            std::vector<double> S(n, 0.0);
            stabilization_row(m, i, [&](Index k, Index b) { return m.beta(k, b); }, S);
            for (Index l = 0; l < n; ++l)
                for (int a = 0; a < D; ++a) at(l, a, a) -= cu * S[l];
            std::fill(S.begin(), S.end(), 0.0);
            stabilization_row(m, i, [&](Index k, Index b) { return m.lambda(k, b); }, S);
            for (Index l = 0; l < n; ++l) at(l, D, D) -= cp * S[l];
        }

        // Constraint rows: unit diagonal.
        for (int r = 0; r < kB; ++r) {
            if (!m.constrained(m.points[i].dof(r))) continue;
            for (Index l = 0; l < row_width(i); ++l)
                for (int c = 0; c < kB; ++c) at(l, r, c) = 0.0;
            at(li, r, r) = 1.0;
        }
    }
};

}  // namespace peripore

#endif  // PERIPORE_TANGENT_HPP
