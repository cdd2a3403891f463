#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ccx/grid.hpp"
#include "ccx/parallel.hpp"

namespace ccx {

namespace detail {

/// Lower envelope of parabolas along one line:
///   out[i] = min_j f[j] + w * (i - j)^2,  w > 0.
/// Single forward pass building the hull of contributing parabolas, then one
/// scan to evaluate. +inf entries mark absent sites and never contribute;
/// boundary ties are resolved toward the newer parabola (values unaffected).
inline void lower_parabola_line(const std::vector<double>& f, double w, std::vector<double>& out,
                                std::vector<std::size_t>& hull, std::vector<double>& breaks) {
    const std::size_t n = f.size();
    const double inf = std::numeric_limits<double>::infinity();
    out.resize(n);
    hull.clear();
    breaks.clear();
    for (std::size_t q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        double s = 0.0;
        while (!hull.empty()) {
            const std::size_t p = hull.back();
            const double qq = static_cast<double>(q);
            const double pp = static_cast<double>(p);
            s = ((f[q] + w * qq * qq) - (f[p] + w * pp * pp)) / (2.0 * w * (qq - pp));
            if (s <= breaks.back()) {
                hull.pop_back();
                breaks.pop_back();
            } else {
                break;
            }
        }
        breaks.push_back(hull.empty() ? -inf : s);
        hull.push_back(q);
    }
    if (hull.empty()) {
        std::fill(out.begin(), out.end(), inf);
        return;
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k + 1 < hull.size() && breaks[k + 1] < static_cast<double>(i)) ++k;
        const double di = static_cast<double>(i) - static_cast<double>(hull[k]);
        out[i] = f[hull[k]] + w * di * di;
    }
}

/// In-place separable inf-convolution with the quadratic kernel:
///   values[i] <- min_j values[j] + weight_scale * |x_j - x_i|^2
/// done exactly via one parabola sweep per axis. Tolerates +inf seeds.
inline void axis_parabola_sweeps(std::vector<double>& values, const std::vector<std::size_t>& dims,
                                 const std::vector<double>& spacing, double weight_scale) {
    const auto strides = strides_of(dims);
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (dims[a] < 2) continue;
        const std::size_t stride = strides[a];
        const std::size_t inner = stride;
        const std::size_t outer = values.size() / (dims[a] * inner);
        const double w = weight_scale * spacing[a] * spacing[a];
        const std::size_t len = dims[a];
        parallel_for(outer * inner, [&](std::size_t line) {
            thread_local std::vector<double> buf, env, breaks;
            thread_local std::vector<std::size_t> hull;
            const std::size_t o = line / inner;
            const std::size_t in = line % inner;
            const std::size_t base = o * len * inner + in;
            buf.resize(len);
            for (std::size_t j = 0; j < len; ++j) buf[j] = values[base + j * stride];
            lower_parabola_line(buf, w, env, hull, breaks);
            for (std::size_t j = 0; j < len; ++j) values[base + j * stride] = env[j];
        });
    }
}

}  // namespace detail

enum class MoreauKind { lower, upper };

/// Quadratic Moreau envelope of the sampled function, exact over grid nodes:
///   lower: min_z f(z) + lambda |z - x|^2
///   upper: max_z f(z) - lambda |z - x|^2
/// The upper envelope is computed as the negated lower envelope of -f, so the
/// two directions are bitwise duals.
inline ScalarGrid moreau(const ScalarGrid& f, MoreauKind kind, double lambda) {
    validate_grid(f);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("moreau: lambda must be positive");
    ScalarGrid out = f;
    if (kind == MoreauKind::upper)
        for (double& v : out.values) v = -v;
    detail::axis_parabola_sweeps(out.values, out.dims, out.spacing, lambda);
    if (kind == MoreauKind::upper)
        for (double& v : out.values) v = -v;
    return out;
}

/// Piecewise-linear function given by knots with strictly increasing x.
struct PiecewiseLinear {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double q) const {
        const double lo = x.front(), hi = x.back();
        const double slack = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
        if (q < lo - slack || q > hi + slack) throw std::domain_error("PiecewiseLinear: point outside hull domain");
        if (x.size() == 1) return y.front();
        auto it = std::upper_bound(x.begin(), x.end(), q);
        std::size_t hi_i = static_cast<std::size_t>(it - x.begin());
        if (hi_i == 0) hi_i = 1;
        if (hi_i == x.size()) hi_i = x.size() - 1;
        const std::size_t lo_i = hi_i - 1;
        const double t = (q - x[lo_i]) / (x[hi_i] - x[lo_i]);
        return y[lo_i] + t * (y[hi_i] - y[lo_i]);
    }
};

/// Lower convex hull of the 1D point set (xs must be strictly increasing),
/// i.e. the convex envelope of the sampled data. Exists as an independent
/// cross-check for the envelope pipeline; not used by the transforms.
inline PiecewiseLinear convex_envelope_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("convex_envelope_1d: size mismatch");
    if (xs.empty()) throw std::invalid_argument("convex_envelope_1d: no points");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw std::invalid_argument("convex_envelope_1d: non-finite input");
        if (i + 1 < xs.size() && !(xs[i] < xs[i + 1]))
            throw std::invalid_argument("convex_envelope_1d: xs must be strictly increasing");
    }
    PiecewiseLinear h;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        // Pop while the previous knot lies on or above the chord: slopes must
        // strictly increase along the lower hull.
        while (h.x.size() >= 2) {
            const std::size_t m = h.x.size();
            const double cross = (h.x[m - 1] - h.x[m - 2]) * (ys[i] - h.y[m - 2]) -
                                 (h.y[m - 1] - h.y[m - 2]) * (xs[i] - h.x[m - 2]);
            if (cross <= 0.0) {
                h.x.pop_back();
                h.y.pop_back();
            } else {
                break;
            }
        }
        h.x.push_back(xs[i]);
        h.y.push_back(ys[i]);
    }
    return h;
}

}  // namespace ccx
