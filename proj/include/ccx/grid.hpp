#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccx {

using Point = std::vector<double>;

/// Axis-aligned uniform grid geometry: per-axis node counts, origin and spacing.
/// Values are stored row-major with the last axis fastest.
struct GridSpec {
    std::vector<std::size_t> dims;
    std::vector<double> origin;
    std::vector<double> spacing;
};

/// Sampled scalar field on a GridSpec. valid_margin[a] counts nodes on each
/// side of axis a whose values are contaminated (by padding or by boundary
/// effects of a transform) and must not be used in comparisons.
struct ScalarGrid {
    std::vector<std::size_t> dims;
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<std::size_t> valid_margin;
    std::vector<double> values;
};

inline std::size_t axis_count(const ScalarGrid& g) { return g.dims.size(); }

inline std::size_t node_count(const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
}

inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> s(dims.size());
    std::size_t acc = 1;
    for (std::size_t a = dims.size(); a-- > 0;) {
        s[a] = acc;
        acc *= dims[a];
    }
    return s;
}

inline std::size_t flatten(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& strides) {
    std::size_t f = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) f += idx[a] * strides[a];
    return f;
}

inline std::vector<std::size_t> unflatten(std::size_t flat, const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;) {
        idx[a] = flat % dims[a];
        flat /= dims[a];
    }
    return idx;
}

inline std::vector<double> node_coord(const ScalarGrid& g, const std::vector<std::size_t>& idx) {
    std::vector<double> x(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) x[a] = g.origin[a] + static_cast<double>(idx[a]) * g.spacing[a];
    return x;
}

inline void validate_spec(const GridSpec& s) {
    if (s.dims.empty()) throw std::invalid_argument("grid: no axes");
    if (s.origin.size() != s.dims.size() || s.spacing.size() != s.dims.size())
        throw std::invalid_argument("grid: dims/origin/spacing size mismatch");
    for (std::size_t a = 0; a < s.dims.size(); ++a) {
        if (s.dims[a] == 0) throw std::invalid_argument("grid: empty axis " + std::to_string(a));
        if (!(s.spacing[a] > 0.0) || !std::isfinite(s.spacing[a]))
            throw std::invalid_argument("grid: spacing on axis " + std::to_string(a) + " must be positive");
        if (!std::isfinite(s.origin[a]))
            throw std::invalid_argument("grid: origin on axis " + std::to_string(a) + " must be finite");
    }
}

/// Full invariant check: geometry, value count, finite values, margins at most
/// half the axis extent. Throws std::invalid_argument with the offending node.
inline void validate_grid(const ScalarGrid& g) {
    validate_spec(GridSpec{g.dims, g.origin, g.spacing});
    if (g.valid_margin.size() != g.dims.size())
        throw std::invalid_argument("grid: valid_margin size mismatch");
    for (std::size_t a = 0; a < g.dims.size(); ++a)
        if (2 * g.valid_margin[a] > g.dims[a])
            throw std::invalid_argument("grid: valid_margin exceeds half of axis " + std::to_string(a));
    if (g.values.size() != node_count(g.dims))
        throw std::invalid_argument("grid: value count does not match dims");
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (!std::isfinite(g.values[i])) {
            auto idx = unflatten(i, g.dims);
            std::string where;
            for (std::size_t a = 0; a < idx.size(); ++a) where += (a ? "," : "(") + std::to_string(idx[a]);
            throw std::invalid_argument("grid: non-finite value at " + where + ")");
        }
    }
}

inline ScalarGrid make_grid(const GridSpec& spec, double fill = 0.0) {
    validate_spec(spec);
    ScalarGrid g;
    g.dims = spec.dims;
    g.origin = spec.origin;
    g.spacing = spec.spacing;
    g.valid_margin.assign(spec.dims.size(), 0);
    g.values.assign(node_count(spec.dims), fill);
    return g;
}

/// Sample fn(x) at every node. fn takes the node coordinate vector.
template <class F>
ScalarGrid sample_grid(const GridSpec& spec, F&& fn) {
    ScalarGrid g = make_grid(spec);
    const std::size_t n = g.values.size();
    std::vector<std::size_t> idx(g.dims.size(), 0);
    std::vector<double> x(g.dims.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < g.dims.size(); ++a) x[a] = g.origin[a] + static_cast<double>(idx[a]) * g.spacing[a];
        g.values[i] = fn(x);
        for (std::size_t a = g.dims.size(); a-- > 0;) {
            if (++idx[a] < g.dims[a]) break;
            idx[a] = 0;
        }
    }
    return g;
}

inline bool congruent(const ScalarGrid& a, const ScalarGrid& b) {
    if (a.dims != b.dims) return false;
    for (std::size_t i = 0; i < a.dims.size(); ++i) {
        if (std::abs(a.origin[i] - b.origin[i]) > 1e-12 * (1.0 + std::abs(a.origin[i]))) return false;
        if (std::abs(a.spacing[i] - b.spacing[i]) > 1e-12 * a.spacing[i]) return false;
    }
    return true;
}

template <class F>
ScalarGrid map_values(const ScalarGrid& g, F&& fn) {
    ScalarGrid out = g;
    for (double& v : out.values) v = fn(v);
    return out;
}

/// Elementwise combination of two congruent grids; the result inherits the
/// wider margin per axis.
template <class F>
ScalarGrid zip_values(const ScalarGrid& a, const ScalarGrid& b, F&& fn) {
    if (!congruent(a, b)) throw std::invalid_argument("zip_values: grids are not congruent");
    ScalarGrid out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = fn(a.values[i], b.values[i]);
    for (std::size_t ax = 0; ax < out.dims.size(); ++ax)
        out.valid_margin[ax] = std::max(a.valid_margin[ax], b.valid_margin[ax]);
    return out;
}

/// Largest per-axis difference quotient between adjacent nodes. This is the
/// grid analogue of a Lipschitz constant and feeds the locality radius.
inline double estimate_lipschitz(const ScalarGrid& g) {
    validate_grid(g);
    for (std::size_t a = 0; a < g.dims.size(); ++a)
        if (g.dims[a] < 2)
            throw std::invalid_argument("estimate_lipschitz: axis " + std::to_string(a) + " has fewer than 2 nodes");
    const auto strides = strides_of(g.dims);
    double best = 0.0;
    for (std::size_t a = 0; a < g.dims.size(); ++a) {
        const std::size_t stride = strides[a];
        const std::size_t lines = g.values.size() / g.dims[a];
        const std::size_t inner = stride;
        const std::size_t outer = lines / inner;
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * g.dims[a] * inner + in;
                for (std::size_t j = 0; j + 1 < g.dims[a]; ++j) {
                    const double d = std::abs(g.values[base + (j + 1) * stride] - g.values[base + j * stride]);
                    best = std::max(best, d / g.spacing[a]);
                }
            }
        }
    }
    return best;
}

/// Radius beyond which an L-Lipschitz function cannot influence the
/// compensated transforms at a point: (2 + sqrt(2)) * L / lambda.
inline double locality_radius(double lipschitz, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("locality_radius: lambda must be positive");
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw std::invalid_argument("locality_radius: L must be nonnegative");
    return (2.0 + std::sqrt(2.0)) * lipschitz / lambda;
}

/// Extend the grid on every side by ceil(r/h) nodes, r the locality radius,
/// filling with the nearest edge value plus L times the (per-axis) overhang
/// distance. The extension has the same per-axis Lipschitz estimate, so
/// transform values at the original nodes do not depend on the pad width.
inline ScalarGrid pad_for_locality(const ScalarGrid& f, double lipschitz, double lambda) {
    validate_grid(f);
    const double r = locality_radius(lipschitz, lambda);
    const std::size_t d = f.dims.size();
    std::vector<std::size_t> width(d);
    for (std::size_t a = 0; a < d; ++a)
        width[a] = static_cast<std::size_t>(std::ceil(r / f.spacing[a]));

    ScalarGrid out;
    out.dims.resize(d);
    out.origin.resize(d);
    out.spacing = f.spacing;
    out.valid_margin.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
        out.dims[a] = f.dims[a] + 2 * width[a];
        out.origin[a] = f.origin[a] - static_cast<double>(width[a]) * f.spacing[a];
        out.valid_margin[a] = width[a] + f.valid_margin[a];
    }
    out.values.assign(node_count(out.dims), 0.0);

    const auto src_strides = strides_of(f.dims);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double over = 0.0;
        std::size_t src = 0;
        for (std::size_t a = 0; a < d; ++a) {
            std::size_t s;
            if (idx[a] < width[a]) {
                s = 0;
                over += static_cast<double>(width[a] - idx[a]) * f.spacing[a];
            } else if (idx[a] >= width[a] + f.dims[a]) {
                s = f.dims[a] - 1;
                over += static_cast<double>(idx[a] - (width[a] + f.dims[a] - 1)) * f.spacing[a];
            } else {
                s = idx[a] - width[a];
            }
            src += s * src_strides[a];
        }
        out.values[i] = f.values[src] + lipschitz * over;
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < out.dims[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

/// Drop width[a] nodes from both ends of every axis. Inverse of a pad.
inline ScalarGrid crop(const ScalarGrid& g, const std::vector<std::size_t>& width) {
    if (width.size() != g.dims.size()) throw std::invalid_argument("crop: width size mismatch");
    const std::size_t d = g.dims.size();
    ScalarGrid out;
    out.dims.resize(d);
    out.origin.resize(d);
    out.spacing = g.spacing;
    out.valid_margin.assign(d, 0);
    for (std::size_t a = 0; a < d; ++a) {
        if (2 * width[a] >= g.dims[a]) throw std::invalid_argument("crop: nothing left on axis " + std::to_string(a));
        out.dims[a] = g.dims[a] - 2 * width[a];
        out.origin[a] = g.origin[a] + static_cast<double>(width[a]) * g.spacing[a];
        out.valid_margin[a] = g.valid_margin[a] > width[a] ? g.valid_margin[a] - width[a] : 0;
    }
    out.values.resize(node_count(out.dims));
    const auto src_strides = strides_of(g.dims);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        std::size_t src = 0;
        for (std::size_t a = 0; a < d; ++a) src += (idx[a] + width[a]) * src_strides[a];
        out.values[i] = g.values[src];
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < out.dims[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

/// True for nodes outside every axis margin; comparisons in checks and tests
/// are restricted to these.
inline bool is_valid_node(const ScalarGrid& g, const std::vector<std::size_t>& idx) {
    for (std::size_t a = 0; a < g.dims.size(); ++a)
        if (idx[a] < g.valid_margin[a] || idx[a] + g.valid_margin[a] >= g.dims[a]) return false;
    return true;
}

}  // namespace ccx
