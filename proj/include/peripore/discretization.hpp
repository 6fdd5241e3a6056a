// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file discretization.hpp
/// \brief Uniform lattices of mixed material points, boundary-layer tagging and horizon families.

#ifndef PERIPORE_DISCRETIZATION_HPP
#define PERIPORE_DISCRETIZATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "peripore/core.hpp"

namespace peripore {

enum class Face : std::uint8_t { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

constexpr std::uint8_t face_bit(Face f) { return std::uint8_t(1u << unsigned(f)); }
constexpr Face min_face(int axis) { return Face(2 * axis); }
constexpr Face max_face(int axis) { return Face(2 * axis + 1); }

inline const char* face_name(Face f) {
    static constexpr const char* names[] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
    return names[unsigned(f)];
}

struct GridSpec {
    int dimension = 1;
    std::array<double, 3> extents{0.0, 0.0, 0.0};
    double spacing = 0.0;
    double horizon_factor = 2.05;
    int boundary_layer_depth = 0;  ///< 0 selects ceil(horizon_factor)

    double horizon() const { return horizon_factor * spacing; }

    int layer_depth() const {
        return boundary_layer_depth > 0 ? boundary_layer_depth
                                        : int(std::ceil(horizon_factor - 1e-12));
    }

    /// Interior lattice sites per axis; throws GridError when the spec is invalid.
    std::array<long, 3> cells() const {
        if (dimension < 1 || dimension > 3) throw GridError("dimension must be 1, 2 or 3");
        if (!(spacing > 0.0)) throw GridError("lattice spacing must be positive");
        if (!(horizon_factor >= 1.0)) throw GridError("horizon factor must be >= 1");
        if (boundary_layer_depth != 0 &&
            boundary_layer_depth < int(std::ceil(horizon_factor - 1e-12)))
            throw GridError("boundary layer depth must be >= ceil(horizon factor)");
        std::array<long, 3> n{1, 1, 1};
        for (int a = 0; a < dimension; ++a) {
            if (!(extents[a] > 0.0))
                throw GridError("extent along axis " + std::to_string(a) + " must be positive");
            const double ratio = extents[a] / spacing;
            const double r = std::round(ratio);
            if (r < 1.0 || std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio))
                throw GridError("extent " + std::to_string(extents[a]) +
                                " is not an integer multiple of the spacing " +
                                std::to_string(spacing));
            n[a] = long(r);
        }
        return n;
    }
};

template <int D>
struct MaterialPoint {
    Index id = 0;
    Vec<D> x = Vec<D>::Zero();
    double volume = 0.0;
    std::array<long, D> lattice{};
    std::uint8_t faces = 0;  ///< bitmask of boundary faces whose layer contains the point
    int depth = 0;           ///< max layer depth over tagged faces, 0 for interior points

    bool interior() const { return faces == 0; }
    bool on(Face f) const { return (faces & face_bit(f)) != 0; }
    /// Global DOF of displacement component c (c < D) or pressure (c == D).
    Index dof(int c) const { return id * Index(D + 1) + Index(c); }
};

/// Lattice sites x = (k + 1/2) dx for k in [-L, n + L) per axis, x fastest.
template <int D>
std::vector<MaterialPoint<D>> generate_grid(const GridSpec& spec) {
    if (spec.dimension != D) throw GridError("grid dimension does not match template dimension");
    const auto n = spec.cells();
    const long L = spec.layer_depth();
    const double dx = spec.spacing;
    const double vol = std::pow(dx, D);

    std::array<long, D> lo{}, count{};
    Index total = 1;
    for (int a = 0; a < D; ++a) {
        lo[a] = -L;
        count[a] = n[a] + 2 * L;
        total *= Index(count[a]);
    }

    std::vector<MaterialPoint<D>> pts;
    pts.reserve(total);
    std::array<long, D> k{};
    for (Index flat = 0; flat < total; ++flat) {
        Index rem = flat;
        for (int a = 0; a < D; ++a) {
            k[a] = lo[a] + long(rem % Index(count[a]));
            rem /= Index(count[a]);
        }
        MaterialPoint<D> mp;
        mp.id = flat;
        mp.volume = vol;
        mp.lattice = k;
        for (int a = 0; a < D; ++a) {
            mp.x[a] = (double(k[a]) + 0.5) * dx;
            if (k[a] < 0) {
                mp.faces |= face_bit(min_face(a));
                mp.depth = std::max(mp.depth, int(-k[a]));
            } else if (k[a] >= n[a]) {
                mp.faces |= face_bit(max_face(a));
                mp.depth = std::max(mp.depth, int(k[a] - n[a] + 1));
            }
        }
        pts.push_back(mp);
    }
    return pts;
}

template <int D>
struct Bond {
    Index j;
    Vec<D> xi;
    double volume;
};

/// Compressed per-point neighbor lists; bonds of point i are [offset[i], offset[i+1]).
template <int D>
struct Families {
    std::vector<Index> offset;
    std::vector<Bond<D>> bonds;
    std::vector<Index> reverse;  ///< position of bond (j, i) for each bond (i, j)
    double horizon = 0.0;

    Index size() const { return offset.empty() ? 0 : offset.size() - 1; }
    std::span<const Bond<D>> of(Index i) const {
        return {bonds.data() + offset[i], bonds.data() + offset[i + 1]};
    }
    Index begin(Index i) const { return offset[i]; }
    Index end(Index i) const { return offset[i + 1]; }
};

/// Cell-list neighbor search over positions in `points`; neighbors sorted by ascending index.
template <int D>
Families<D> build_families(std::span<const MaterialPoint<D>> points, double delta) {
    Families<D> fam;
    fam.horizon = delta;
    const Index N = points.size();
    fam.offset.assign(N + 1, 0);
    if (N == 0) return fam;

    const double cut = delta * (1.0 + 1e-10);
    const double cut2 = cut * cut;
    Vec<D> lo = points[0].x;
    for (const auto& p : points) lo = lo.cwiseMin(p.x);

    using Key = std::array<long, D>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            std::size_t h = 1469598103934665603ull;
            for (long v : k) h = (h ^ std::size_t(v)) * 1099511628211ull;
            return h;
        }
    };
    auto key_of = [&](const Vec<D>& x) {
        Key k{};
        for (int a = 0; a < D; ++a) k[a] = long(std::floor((x[a] - lo[a]) / cut));
        return k;
    };
    std::unordered_map<Key, std::vector<Index>, KeyHash> cells;
    for (Index i = 0; i < N; ++i) cells[key_of(points[i].x)].push_back(i);

    std::vector<std::vector<Index>> nbrs(N);
    for (Index i = 0; i < N; ++i) {
        const Key ki = key_of(points[i].x);
        Key off{};
        off.fill(-1);
        while (true) {
            Key kk{};
            for (int a = 0; a < D; ++a) kk[a] = ki[a] + off[a];
            if (auto it = cells.find(kk); it != cells.end()) {
                for (Index j : it->second) {
                    if (j == i) continue;
                    if ((points[j].x - points[i].x).squaredNorm() <= cut2) nbrs[i].push_back(j);
                }
            }
            int a = 0;
            for (; a < D; ++a) {
                if (off[a] < 1) {
                    ++off[a];
                    break;
                }
                off[a] = -1;
            }
            if (a == D) break;
        }
        std::sort(nbrs[i].begin(), nbrs[i].end());
    }

    for (Index i = 0; i < N; ++i) fam.offset[i + 1] = fam.offset[i] + nbrs[i].size();
    fam.bonds.reserve(fam.offset[N]);
    for (Index i = 0; i < N; ++i)
        for (Index j : nbrs[i])
            fam.bonds.push_back({j, Vec<D>(points[j].x - points[i].x), points[j].volume});

    fam.reverse.resize(fam.bonds.size());
    for (Index i = 0; i < N; ++i) {
        for (Index b = fam.offset[i]; b < fam.offset[i + 1]; ++b) {
            const Index j = fam.bonds[b].j;
            auto first = fam.bonds.begin() + long(fam.offset[j]);
            auto last = fam.bonds.begin() + long(fam.offset[j + 1]);
            auto it = std::lower_bound(first, last, i,
                                       [](const Bond<D>& bd, Index v) { return bd.j < v; });
            fam.reverse[b] = Index(it - fam.bonds.begin());
        }
    }
    return fam;
}

template <int D>
Families<D> build_families(const std::vector<MaterialPoint<D>>& points, double delta) {
    return build_families<D>(std::span<const MaterialPoint<D>>(points), delta);
}

}  // namespace peripore

#endif  // PERIPORE_DISCRETIZATION_HPP
