// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "peripore/discretization.hpp"

using namespace peripore;

namespace {

GridSpec column(double L, double dx) {
    GridSpec g;
    g.dimension = 1;
    g.extents = {L, 0, 0};
    g.spacing = dx;
    return g;
}

}  // namespace

TEST(Grid, ColumnCountsAndLayers) {
    const auto pts = generate_grid<1>(column(10.0, 0.04));
    ASSERT_EQ(pts.size(), 256u);
    long interior = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.interior(); });
    EXPECT_EQ(interior, 250);
    long bottom = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.on(Face::XMin); });
    long top = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.on(Face::XMax); });
    EXPECT_EQ(bottom, 3);
    EXPECT_EQ(top, 3);
    EXPECT_DOUBLE_EQ(pts.front().x[0], -2.5 * 0.04);
    EXPECT_EQ(pts.front().depth, 3);
}

TEST(Grid, LocalizationCoarseCount) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {30.0, 60.0, 0};
    g.spacing = 0.3;
    const auto n = g.cells();
    EXPECT_EQ(n[0] * n[1], 20000);
}

TEST(Grid, VolumeSumsToExtents) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {1.2, 0.8, 0};
    g.spacing = 0.1;
    const auto pts = generate_grid<2>(g);
    double v = 0.0;
    for (const auto& p : pts)
        if (p.interior()) v += p.volume;
    EXPECT_NEAR(v, 1.2 * 0.8, 1e-12);
    for (const auto& p : pts) EXPECT_GT(p.volume, 0.0);
}

TEST(Grid, SinglePointColumn) {
    const auto pts = generate_grid<1>(column(0.5, 0.5));
    long interior = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.interior(); });
    EXPECT_EQ(interior, 1);
}

TEST(Grid, RejectsInvalidSpecs) {
    EXPECT_THROW(generate_grid<1>(column(-1.0, 0.1)), GridError);
    EXPECT_THROW(generate_grid<1>(column(1.05, 0.1)), GridError);
    EXPECT_THROW(generate_grid<1>(column(1.0, 0.0)), GridError);
    GridSpec g = column(1.0, 0.1);
    g.boundary_layer_depth = 2;
    EXPECT_THROW(generate_grid<1>(g), GridError);
    g.boundary_layer_depth = 0;
    g.horizon_factor = 0.5;
    EXPECT_THROW(generate_grid<1>(g), GridError);
}

TEST(Grid, DofMapUnique) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {0.5, 0.5, 0};
    g.spacing = 0.1;
    const auto pts = generate_grid<2>(g);
    std::vector<Index> dofs;
    for (const auto& p : pts)
        for (int c = 0; c < 3; ++c) dofs.push_back(p.dof(c));
    std::sort(dofs.begin(), dofs.end());
    EXPECT_EQ(std::adjacent_find(dofs.begin(), dofs.end()), dofs.end());
}

TEST(Grid, CornerPointsCarryBothFaces) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {0.5, 0.5, 0};
    g.spacing = 0.1;
    const auto pts = generate_grid<2>(g);
    const auto& c = pts.front();
    EXPECT_TRUE(c.on(Face::XMin));
    EXPECT_TRUE(c.on(Face::YMin));
}

TEST(Families, InteriorNeighborCounts) {
    GridSpec g;
    g.dimension = 3;
    g.extents = {0.5, 0.5, 0.5};
    g.spacing = 0.1;
    const auto pts = generate_grid<3>(g);
    const auto fam = build_families<3>(pts, g.horizon());
    for (Index i = 0; i < pts.size(); ++i) {
        if (pts[i].interior()) {
            EXPECT_EQ(fam.of(i).size(), 32u);
        }
    }

    const auto p1 = generate_grid<1>(column(1.0, 0.1));
    const auto f1 = build_families<1>(p1, 0.205);
    for (Index i = 0; i < p1.size(); ++i) {
        if (p1[i].interior()) {
            EXPECT_EQ(f1.of(i).size(), 4u);
        }
    }
}

TEST(Families, ReciprocityAndExactBonds) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {0.6, 0.4, 0};
    g.spacing = 0.1;
    const auto pts = generate_grid<2>(g);
    const auto fam = build_families<2>(pts, g.horizon());
    for (Index i = 0; i < pts.size(); ++i) {
        Index prev = 0;
        bool first = true;
        for (Index b = fam.begin(i); b < fam.end(i); ++b) {
            const auto& bd = fam.bonds[b];
            EXPECT_NE(bd.j, i);
            if (!first) {
                EXPECT_GT(bd.j, prev);
            }
            prev = bd.j;
            first = false;
            EXPECT_GT(bd.xi.norm(), 0.0);
            EXPECT_LE(bd.xi.norm(), g.horizon() * (1 + 1e-10));
            EXPECT_EQ(bd.xi, (pts[bd.j].x - pts[i].x).eval());
            const auto& rev = fam.bonds[fam.reverse[b]];
            EXPECT_EQ(rev.j, i);
            EXPECT_EQ(rev.xi, (-bd.xi).eval());
        }
    }
}

TEST(Families, IsolatedPointHasEmptyFamily) {
    std::vector<MaterialPoint<2>> pts(2);
    pts[0].id = 0;
    pts[0].x = Vec<2>(0, 0);
    pts[0].volume = 1;
    pts[1].id = 1;
    pts[1].x = Vec<2>(5, 0);
    pts[1].volume = 1;
    const auto fam = build_families<2>(pts, 1.0);
    EXPECT_TRUE(fam.of(0).empty());
    EXPECT_TRUE(fam.of(1).empty());
}

TEST(Families, PermutationInvariant) {
    GridSpec g;
    g.dimension = 2;
    g.extents = {0.5, 0.3, 0};
    g.spacing = 0.1;
    auto pts = generate_grid<2>(g);
    const auto fam = build_families<2>(pts, g.horizon());

    std::vector<Index> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 rng(7);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<MaterialPoint<2>> shuffled(pts.size());
    for (Index k = 0; k < pts.size(); ++k) shuffled[k] = pts[perm[k]];
    const auto fam2 = build_families<2>(shuffled, g.horizon());

    for (Index k = 0; k < pts.size(); ++k) {
        std::vector<Index> a, b;
        for (const auto& bd : fam.of(perm[k])) a.push_back(bd.j);
        for (const auto& bd : fam2.of(k)) b.push_back(perm[bd.j]);
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
}
