// Copyright (c) 2026 The peripore authors.
// SPDX-License-Identifier: Apache-2.0

/// \file analysis.hpp
/// \brief Post-processing of run results: shear-band extraction from snapshots,
/// cross-section peaks, spectral energy and time-window statistics of probe signals.

#ifndef PERIPORE_ANALYSIS_HPP
#define PERIPORE_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "peripore/scenarios.hpp"

namespace peripore::analysis {

struct BandOptions {
    double spacing = 1.0;         ///< point spacing of the snapshot [m]
    double smoothing = 1.0;       ///< Gaussian smoothing length in spacings
    double sigma_factor = 0.0;    ///< ridge threshold = mean + sigma_factor * stddev of eps_s
    double capture = 1.5;         ///< half width of a band in spacings
    double angle_step_deg = 1.0;  ///< Hough angle resolution
    int min_votes = 0;            ///< 0 selects max(6, 2% of ridge points)
    int max_bands = 8;
};

struct Band {
    double angle_deg = 0.0;  ///< direction from the x axis, in (-90, 90]
    Index points = 0;
    double length = 0.0;     ///< extent along the principal axis [m]
    std::array<double, 2> centroid{0, 0};
    std::array<double, 2> axis{1, 0};
    double lo = 0.0, hi = 0.0;  ///< extent along `axis` relative to the centroid

    /// Inclined enough to count as a shear band.
    bool inclined() const { return std::abs(angle_deg) >= 5.0 && std::abs(angle_deg) <= 85.0; }

    bool covers(const std::array<double, 3>& x, double half_width) const {
        const double dx = x[0] - centroid[0], dy = x[1] - centroid[1];
        const double s = dx * axis[0] + dy * axis[1];
        const double n = -dx * axis[1] + dy * axis[0];
        return std::abs(n) <= half_width && s >= lo - half_width && s <= hi + half_width;
    }
};

struct BandReport {
    double threshold = 0.0;  ///< eps_s threshold applied to ridge points
    Index ridge_points = 0;
    std::vector<Band> bands;
    int positive = 0;  ///< inclined bands rising with x
    int negative = 0;
    int pairs = 0;     ///< conjugate pairs, min(positive, negative)
    Index inside_points = 0;
    double inside_eps_vp = 0.0;
    double outside_eps_vp = 0.0;
    double inside_p = 0.0;
    double outside_p = 0.0;

    /// Mean inclination magnitude of the inclined bands.
    double mean_abs_angle() const {
        double a = 0.0;
        int n = 0;
        for (const auto& b : bands)
            if (b.inclined()) {
                a += std::abs(b.angle_deg);
                ++n;
            }
        return n ? a / n : 0.0;
    }
};

namespace detail {

inline Band principal_axis(const std::vector<std::array<double, 2>>& pts) {
    Band b;
    b.points = Index(pts.size());
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : pts) c += Eigen::Vector2d(p[0], p[1]);
    c /= double(pts.size());
    Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector2d d = Eigen::Vector2d(p[0], p[1]) - c;
        S += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(S);
    Eigen::Vector2d v = es.eigenvectors().col(1);
    if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
    b.angle_deg = std::atan2(v[1], v[0]) * 180.0 / std::numbers::pi;
    if (b.angle_deg <= -90.0) b.angle_deg += 180.0;
    for (const auto& p : pts) {
        const double s = (Eigen::Vector2d(p[0], p[1]) - c).dot(v);
        b.lo = std::min(b.lo, s);
        b.hi = std::max(b.hi, s);
    }
    b.length = b.hi - b.lo;
    b.centroid = {c[0], c[1]};
    b.axis = {v[0], v[1]};
    return b;
}

}  // namespace detail

/// Lattice image of the interior eps_s field, Gaussian smoothed with clamped edges.
struct RidgeImage {
    int nx = 0, ny = 0;
    std::vector<double> raw;    ///< eps_s, row major in y
    std::vector<double> value;  ///< smoothed eps_s
    std::vector<char> present;
    std::vector<std::array<double, 2>> pos;

    double at(int i, int j) const { return value[std::size_t(j) * nx + i]; }

    double sample(double fi, double fj) const {
        fi = std::clamp(fi, 0.0, double(nx - 1));
        fj = std::clamp(fj, 0.0, double(ny - 1));
        const int i = std::min(int(fi), std::max(nx - 2, 0)), j = std::min(int(fj), std::max(ny - 2, 0));
        const double a = nx > 1 ? fi - i : 0.0, b = ny > 1 ? fj - j : 0.0;
        const int i1 = std::min(i + 1, nx - 1), j1 = std::min(j + 1, ny - 1);
        return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i1, j) + (1 - a) * b * at(i, j1) + a * b * at(i1, j1);
    }
};

namespace detail {

inline std::vector<double> smooth_axis(const std::vector<double>& f, int nx, int ny, double sigma, bool along_x) {
    if (sigma <= 0.0) return f;
    const int r = int(std::ceil(4.0 * sigma));
    std::vector<double> w(std::size_t(2 * r + 1));
    double sum = 0.0;
    for (int k = -r; k <= r; ++k) sum += w[std::size_t(k + r)] = std::exp(-0.5 * k * k / (sigma * sigma));
    for (double& v : w) v /= sum;
    std::vector<double> out(f.size(), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int ii = along_x ? std::clamp(i + k, 0, nx - 1) : i;
                const int jj = along_x ? j : std::clamp(j + k, 0, ny - 1);
                acc += w[std::size_t(k + r)] * f[std::size_t(jj) * nx + ii];
            }
            out[std::size_t(j) * nx + i] = acc;
        }
    return out;
}

/// Central differences inside, one-sided at the edges.
inline std::vector<double> diff(const std::vector<double>& f, int nx, int ny, bool along_x) {
    std::vector<double> out(f.size(), 0.0);
    const int n = along_x ? nx : ny;
    if (n < 2) return out;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int c = along_x ? i : j;
            auto idx = [&](int k) { return along_x ? std::size_t(j) * nx + k : std::size_t(k) * nx + i; };
            const int lo = std::max(c - 1, 0), hi = std::min(c + 1, n - 1);
            out[idx(c)] = (f[idx(hi)] - f[idx(lo)]) / double(hi - lo);
        }
    return out;
}

}  // namespace detail

inline RidgeImage ridge_image(const FieldSnapshot& snap, double smoothing) {
    RidgeImage img;
    long x0 = std::numeric_limits<long>::max(), y0 = x0, x1 = std::numeric_limits<long>::min(), y1 = x1;
    for (const auto& r : snap.records)
        if (r.interior) {
            x0 = std::min(x0, long(r.lattice[0]));
            x1 = std::max(x1, long(r.lattice[0]));
            y0 = std::min(y0, long(r.lattice[1]));
            y1 = std::max(y1, long(r.lattice[1]));
        }
    if (x1 < x0) return img;
    img.nx = int(x1 - x0 + 1);
    img.ny = int(y1 - y0 + 1);
    const std::size_t n = std::size_t(img.nx) * std::size_t(img.ny);
    std::vector<double>& raw = img.raw;
    raw.assign(n, 0.0);
    img.present.assign(n, 0);
    img.pos.assign(n, {0.0, 0.0});
    double sum = 0.0;
    Index count = 0;
    for (const auto& r : snap.records)
        if (r.interior) {
            const auto k = std::size_t(r.lattice[1] - y0) * img.nx + std::size_t(r.lattice[0] - x0);
            raw[k] = r.eps_s;
            img.present[k] = 1;
            img.pos[k] = {r.x[0], r.x[1]};
            sum += r.eps_s;
            ++count;
        }
    for (std::size_t k = 0; k < n; ++k)
        if (!img.present[k]) raw[k] = sum / double(count);
    img.value = detail::smooth_axis(detail::smooth_axis(raw, img.nx, img.ny, smoothing, true), img.nx, img.ny,
                                    smoothing, false);
    return img;
}

/// Extracts straight shear bands from the interior eps_s field of a 2D snapshot.
///
/// The field is smoothed on its lattice. A point is a ridge point when the Hessian has a
/// dominant negative curvature (-l1 > |l2|), the smoothed value is a maximum along that
/// curvature direction, and the raw value exceeds mean + k stddev of the interior field.
/// Ridge points are fed to a Hough accumulator; the strongest line is taken, fitted by its
/// principal axis, its points are removed and the search repeats.
inline BandReport detect_bands(const FieldSnapshot& snap, const BandOptions& opt) {
    BandReport rep;
    std::vector<const SnapshotRecord*> interior;
    for (const auto& r : snap.records)
        if (r.interior) interior.push_back(&r);
    double mean = 0.0, sq = 0.0;
    for (const auto* r : interior) mean += r->eps_s;
    mean /= double(std::max<std::size_t>(interior.size(), 1));
    for (const auto* r : interior) sq += (r->eps_s - mean) * (r->eps_s - mean);
    const double thr = mean + opt.sigma_factor * std::sqrt(sq / double(std::max<std::size_t>(interior.size(), 1)));

    rep.threshold = thr;
    const RidgeImage img = ridge_image(snap, opt.smoothing);
    const auto gx = detail::diff(img.value, img.nx, img.ny, true);
    const auto gy = detail::diff(img.value, img.nx, img.ny, false);
    const auto hxx = detail::diff(gx, img.nx, img.ny, true);
    const auto hyy = detail::diff(gy, img.nx, img.ny, false);
    const auto hxy = detail::diff(gy, img.nx, img.ny, true);

    std::vector<std::array<double, 2>> ridge;
    for (int j = 0; j < img.ny; ++j)
        for (int i = 0; i < img.nx; ++i) {
            const std::size_t k = std::size_t(j) * img.nx + i;
            if (!img.present[k] || img.raw[k] <= thr) continue;
            const double a = hxx[k], b = hxy[k], c = hyy[k];
            const double m = 0.5 * (a + c), d = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
            const double l1 = m - d, l2 = m + d;
            if (-l1 <= std::abs(l2)) continue;
            double nx = b, ny = l1 - a;
            if (std::abs(nx) + std::abs(ny) < 1e-300) {
                nx = a <= c ? 1.0 : 0.0;
                ny = a <= c ? 0.0 : 1.0;
            }
            const double len = std::hypot(nx, ny);
            nx /= len;
            ny /= len;
            const double v = img.value[k];
            if (v >= img.sample(i + nx, j + ny) && v >= img.sample(i - nx, j - ny)) ridge.push_back(img.pos[k]);
        }
    rep.ridge_points = Index(ridge.size());

    if (!ridge.empty()) {
        const int min_votes =
            opt.min_votes > 0 ? opt.min_votes : std::max(6, int(std::ceil(0.02 * double(ridge.size()))));
        const int n_theta = std::max(1, int(std::lround(180.0 / opt.angle_step_deg)));
        double rmax = 0.0;
        for (const auto& p : ridge) rmax = std::max(rmax, std::hypot(p[0], p[1]));
        const double bin = opt.spacing;
        const int n_rho = 2 * int(std::ceil(rmax / bin)) + 3;
        const double half = opt.capture * opt.spacing;

        std::vector<double> cs(n_theta), sn(n_theta);
        for (int t = 0; t < n_theta; ++t) {
            const double th = double(t) * std::numbers::pi / double(n_theta);
            cs[t] = std::cos(th);
            sn[t] = std::sin(th);
        }

        std::vector<int> acc(std::size_t(n_theta) * std::size_t(n_rho));
        while (int(rep.bands.size()) < opt.max_bands && ridge.size() >= std::size_t(min_votes)) {
            std::fill(acc.begin(), acc.end(), 0);
            for (const auto& p : ridge)
                for (int t = 0; t < n_theta; ++t) {
                    const double rho = p[0] * cs[t] + p[1] * sn[t];
                    const int k = int(std::lround(rho / bin)) + n_rho / 2;
                    ++acc[std::size_t(t) * n_rho + k];
                }
            const auto it = std::max_element(acc.begin(), acc.end());
            if (*it < min_votes) break;
            const auto idx = std::size_t(it - acc.begin());
            const int t = int(idx / n_rho);
            const double rho = double(int(idx % n_rho) - n_rho / 2) * bin;

            std::vector<std::array<double, 2>> on, off;
            for (const auto& p : ridge)
                (std::abs(p[0] * cs[t] + p[1] * sn[t] - rho) <= half ? on : off).push_back(p);
            if (on.size() < std::size_t(min_votes)) break;
            rep.bands.push_back(detail::principal_axis(on));
            ridge = std::move(off);
        }
    }

    for (const auto& b : rep.bands)
        if (b.inclined()) (b.angle_deg > 0.0 ? rep.positive : rep.negative) += 1;
    rep.pairs = std::min(rep.positive, rep.negative);

    const double half = opt.capture * opt.spacing;
    double vi = 0.0, vo = 0.0, pi = 0.0, po = 0.0;
    Index no = 0;
    for (const auto* r : interior) {
            const bool in = std::any_of(rep.bands.begin(), rep.bands.end(),
                                        [&](const Band& b) { return b.inclined() && b.covers(r->x, half); });
            (in ? vi : vo) += r->eps_vp;
            (in ? pi : po) += r->p;
            (in ? rep.inside_points : no) += 1;
        }
    if (rep.inside_points > 0) {
        rep.inside_eps_vp = vi / double(rep.inside_points);
        rep.inside_p = pi / double(rep.inside_points);
    }
    if (no > 0) {
        rep.outside_eps_vp = vo / double(no);
        rep.outside_p = po / double(no);
    }
    return rep;
}

/// Largest interior eps_s on the row of points closest to height `y`.
inline double cross_section_peak(const FieldSnapshot& snap, double y) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : snap.records)
        if (r.interior) best = std::min(best, std::abs(r.x[1] - y));
    double peak = 0.0;
    for (const auto& r : snap.records)
        if (r.interior && std::abs(std::abs(r.x[1] - y) - best) < 1e-9) peak = std::max(peak, r.eps_s);
    return peak;
}

/// Energy of the mean-free signal above `f_cut` [Hz], by a direct DFT over uniform samples.
inline double high_frequency_energy(const std::vector<double>& signal, double dt, double f_cut) {
    const std::size_t n = signal.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= double(n);
    double e = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = double(k) / (double(n) * dt);
        if (f <= f_cut) continue;
        std::complex<double> X = 0.0;
        const double w = -2.0 * std::numbers::pi * double(k) / double(n);
        for (std::size_t j = 0; j < n; ++j) X += (signal[j] - mean) * std::polar(1.0, w * double(j));
        e += std::norm(X);
    }
    return e;
}

/// Mean of `v` over samples with t in [t0, t1].
inline double window_mean(const std::vector<double>& t, const std::vector<double>& v, double t0,
                          double t1) {
    double s = 0.0;
    Index n = 0;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= t0 && t[k] <= t1) {
            s += v[k];
            ++n;
        }
    return n ? s / double(n) : 0.0;
}

/// RMS of a - b relative to the RMS of b.
inline double relative_rms(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    double d = 0.0, r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        d += (a[k] - b[k]) * (a[k] - b[k]);
        r += b[k] * b[k];
    }
    return r > 0.0 ? std::sqrt(d / r) : std::sqrt(d);
}

/// One column of a probe series.
inline std::vector<double> column(const ProbeSeries& p, const std::string& name) {
    const auto it = std::find(p.columns.begin(), p.columns.end(), name);
    if (it == p.columns.end()) throw ConfigError("probe '" + p.name + "' has no column '" + name + "'");
    const auto c = std::size_t(it - p.columns.begin());
    std::vector<double> out;
    out.reserve(p.samples.size());
    for (const auto& row : p.samples) out.push_back(row[c]);
    return out;
}

inline double peak(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace peripore::analysis

#endif
