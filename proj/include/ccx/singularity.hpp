#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccx/grid.hpp"
#include "ccx/oracle.hpp"
#include "ccx/transforms.hpp"

namespace ccx {

enum class SingularityKind { ridge, valley, edge };

/// Pointwise singularity indicators:
///   ridge  = f - lower transform   (peaks of nonconvexity)
///   valley = upper transform - f   (pits)
///   edge   = ridge + valley        (jump-like features light up both)
/// All are nonnegative; tiny negative roundoff is clamped.
inline ScalarGrid singular_map(const ScalarGrid& f, double lambda, SingularityKind kind) {
    detail::require_lambda(lambda, "singular_map");
    validate_grid(f);
    auto clamp0 = [](double v) { return v > 0.0 ? v : 0.0; };
    switch (kind) {
        case SingularityKind::ridge: {
            const ScalarGrid low = lower_transform(f, lambda);
            return zip_values(f, low, [&](double a, double b) { return clamp0(a - b); });
        }
        case SingularityKind::valley: {
            const ScalarGrid up = upper_transform(f, lambda);
            return zip_values(up, f, [&](double a, double b) { return clamp0(a - b); });
        }
        case SingularityKind::edge: {
            const ScalarGrid r = singular_map(f, lambda, SingularityKind::ridge);
            const ScalarGrid v = singular_map(f, lambda, SingularityKind::valley);
            return zip_values(r, v, [](double a, double b) { return a + b; });
        }
    }
    throw std::logic_error("singular_map: unreachable");
}

/// lambda times the singularity map; the scaling that has a finite landscape
/// limit as lambda grows.
inline ScalarGrid scale1_map(const ScalarGrid& f, double lambda, SingularityKind kind) {
    ScalarGrid m = singular_map(f, lambda, kind);
    for (double& v : m.values) v *= lambda;
    return m;
}

/// Geometric schedule start, start*factor, ... capped at end (inclusive up to
/// a relative slack of 1e-9).
inline std::vector<double> geometric_lambdas(double start, double factor, double end) {
    if (!(start > 0.0) || !std::isfinite(start)) throw std::invalid_argument("lambda schedule: start must be positive");
    if (!(factor > 1.0) || !std::isfinite(factor)) throw std::invalid_argument("lambda schedule: factor must exceed 1");
    if (!(end >= start) || !std::isfinite(end)) throw std::invalid_argument("lambda schedule: end must be at least start");
    std::vector<double> out;
    for (double v = start; v <= end * (1.0 + 1e-9); v *= factor) out.push_back(v);
    return out;
}

struct SweepOptions {
    double lambda_h = 1.0 / 12.0;  // per-lambda spacing: h = lambda_h / lambda
    double max_lambda_h = 0.1;     // resolution rule; spacings beyond this warn
    double safety = 1.25;          // window inflation over the locality reach
    bool extrapolate = false;      // one-step extrapolation in 1/lambda
    double converge_rtol = 0.01;
    std::optional<double> fixed_spacing;  // pin h for every lambda
};

struct SweepReport {
    Point probe;
    std::vector<double> lambdas;
    std::vector<double> values;  // lambda * transform value at the probe
    double limit_estimate = 0.0;
    bool converged = false;
    std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const SweepReport& r) {
    nlohmann::json j;
    j["probe"] = r.probe;
    j["lambdas"] = r.lambdas;
    j["values"] = r.values;
    j["limit_estimate"] = r.limit_estimate;
    j["converged"] = r.converged;
    j["warnings"] = r.warnings;
    return j;
}

namespace detail {

/// Symmetric sampling window around the probe, wide enough that the transform
/// at the probe only sees true samples: the locality reach for the Euclidean
/// Lipschitz bound (inflated by sqrt(d) because padding is built per axis),
/// plus a little slack. The probe is the exact centre node.
inline GridSpec probe_window(const TestFunction& tf, const Point& probe, double lambda, double h, double safety) {
    const std::size_t d = probe.size();
    const double root_d = std::sqrt(static_cast<double>(d));
    const double l1 = lipschitz_bound(tf, probe, 1.0);
    const double rho1 = locality_radius(l1 * root_d, lambda);
    const double l2 = lipschitz_bound(tf, probe, std::max(rho1, 16.0 * h));
    const double rho = safety * locality_radius(l2 * root_d, lambda) + 8.0 * h;
    const std::size_t m = static_cast<std::size_t>(std::ceil(rho / h));
    GridSpec spec;
    spec.dims.assign(d, 2 * m + 1);
    spec.spacing.assign(d, h);
    spec.origin.resize(d);
    for (std::size_t a = 0; a < d; ++a) spec.origin[a] = probe[a] - static_cast<double>(m) * h;
    return spec;
}

inline void finish_sweep(SweepReport& rep, const SweepOptions& opt) {
    const std::size_t n = rep.values.size();
    if (n == 0) return;
    rep.limit_estimate = rep.values.back();
    if (n >= 2) {
        const double a = rep.values[n - 2], b = rep.values[n - 1];
        rep.converged = std::abs(b - a) <= opt.converge_rtol * std::max(std::abs(a), std::abs(b)) + 1e-12;
        if (opt.extrapolate) {
            const double ratio = rep.lambdas[n - 1] / rep.lambdas[n - 2];
            if (ratio > 1.0 + 1e-12) rep.limit_estimate = b + (b - a) / (ratio - 1.0);
        }
    }
}

}  // namespace detail

/// Scale-1 landscape sweep of a closed-form oracle at a probe: for each
/// lambda, sample the oracle on a fresh window whose spacing follows the
/// resolution rule, transform, and record lambda times the map at the probe.
inline SweepReport landscape_sweep(const TestFunction& tf, const Point& probe, const std::vector<double>& lambdas,
                                   SingularityKind kind, const SweepOptions& opt = {}) {
    if (lambdas.empty()) throw std::invalid_argument("landscape_sweep: empty lambda schedule");
    if (static_cast<int>(probe.size()) != tf.dim) throw std::invalid_argument("landscape_sweep: probe dimension mismatch");
    SweepReport rep;
    rep.probe = probe;
    for (double lambda : lambdas) {
        detail::require_lambda(lambda, "landscape_sweep");
        const double h = opt.fixed_spacing ? *opt.fixed_spacing : opt.lambda_h / lambda;
        if (lambda * h > opt.max_lambda_h * (1.0 + 1e-12))
            rep.warnings.push_back("resolution rule violated at lambda=" + std::to_string(lambda) +
                                   ": lambda*h=" + std::to_string(lambda * h));
        const GridSpec spec = detail::probe_window(tf, probe, lambda, h, opt.safety);
        const ScalarGrid g = sample(tf, spec);
        const ScalarGrid m = scale1_map(g, lambda, kind);
        std::vector<std::size_t> centre(spec.dims.size());
        for (std::size_t a = 0; a < spec.dims.size(); ++a) centre[a] = spec.dims[a] / 2;
        rep.lambdas.push_back(lambda);
        rep.values.push_back(m.values[flatten(centre, strides_of(m.dims))]);
    }
    detail::finish_sweep(rep, opt);
    return rep;
}

/// Same sweep on a fixed sampled grid. The probe snaps to the nearest node
/// (with a warning if it is not already one); spacings that break the
/// resolution rule at large lambda warn instead of refining.
inline SweepReport landscape_sweep(const ScalarGrid& f, const Point& probe, const std::vector<double>& lambdas,
                                   SingularityKind kind, const SweepOptions& opt = {}) {
    if (lambdas.empty()) throw std::invalid_argument("landscape_sweep: empty lambda schedule");
    validate_grid(f);
    if (probe.size() != f.dims.size()) throw std::invalid_argument("landscape_sweep: probe dimension mismatch");
    SweepReport rep;
    rep.probe = probe;
    std::vector<std::size_t> idx(f.dims.size());
    bool snapped = false;
    for (std::size_t a = 0; a < f.dims.size(); ++a) {
        const double t = (probe[a] - f.origin[a]) / f.spacing[a];
        if (t < -0.5 || t > static_cast<double>(f.dims[a] - 1) + 0.5)
            throw std::invalid_argument("landscape_sweep: probe outside the grid");
        double rt = std::round(t);
        rt = std::max(0.0, std::min(rt, static_cast<double>(f.dims[a] - 1)));
        if (std::abs(t - rt) > 1e-9) snapped = true;
        idx[a] = static_cast<std::size_t>(rt);
    }
    if (snapped) rep.warnings.push_back("probe snapped to nearest grid node");
    if (!is_valid_node(f, idx)) throw std::invalid_argument("landscape_sweep: probe outside the valid region");
    const std::size_t flat = flatten(idx, strides_of(f.dims));
    double hmax = 0.0;
    for (double s : f.spacing) hmax = std::max(hmax, s);
    for (double lambda : lambdas) {
        detail::require_lambda(lambda, "landscape_sweep");
        if (lambda * hmax > opt.max_lambda_h * (1.0 + 1e-12))
            rep.warnings.push_back("resolution rule violated at lambda=" + std::to_string(lambda) +
                                   ": lambda*h=" + std::to_string(lambda * hmax));
        const ScalarGrid m = scale1_map(f, lambda, kind);
        rep.lambdas.push_back(lambda);
        rep.values.push_back(m.values[flat]);
    }
    detail::finish_sweep(rep, opt);
    return rep;
}

/// Central-difference gradient of a sampled field, one grid per axis.
/// One-sided differences fill the first and last slice of each axis; the
/// returned margins grow by one node to flag them.
inline std::vector<ScalarGrid> gradient_grids(const ScalarGrid& g) {
    validate_grid(g);
    const auto strides = strides_of(g.dims);
    std::vector<ScalarGrid> out;
    for (std::size_t a = 0; a < g.dims.size(); ++a) {
        if (g.dims[a] < 2) throw std::invalid_argument("gradient_grids: axis " + std::to_string(a) + " too short");
        ScalarGrid d = g;
        d.valid_margin[a] = std::min(g.valid_margin[a] + 1, g.dims[a] / 2);
        const std::size_t stride = strides[a];
        const std::size_t inner = stride;
        const std::size_t outer = g.values.size() / (g.dims[a] * inner);
        const double h = g.spacing[a];
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * g.dims[a] * inner + in;
                const std::size_t n = g.dims[a];
                d.values[base] = (g.values[base + stride] - g.values[base]) / h;
                d.values[base + (n - 1) * stride] =
                    (g.values[base + (n - 1) * stride] - g.values[base + (n - 2) * stride]) / h;
                for (std::size_t j = 1; j + 1 < n; ++j)
                    d.values[base + j * stride] =
                        (g.values[base + (j + 1) * stride] - g.values[base + (j - 1) * stride]) / (2.0 * h);
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

/// Gradient of the upper transform; the smoothed field whose gradient tracks
/// the centre of the minisphere of the subdifferential at large lambda.
inline std::vector<ScalarGrid> gradient_upper(const ScalarGrid& f, double lambda) {
    return gradient_grids(upper_transform(f, lambda));
}

/// Gradient of a transform of a closed-form oracle, evaluated at the probe by
/// central differences on a fresh window grid.
inline std::vector<double> gradient_at_probe(const TestFunction& tf, const Point& probe, double lambda,
                                             TransformKind kind, const SweepOptions& opt = {}) {
    detail::require_lambda(lambda, "gradient_at_probe");
    const double h = opt.fixed_spacing ? *opt.fixed_spacing : opt.lambda_h / lambda;
    const GridSpec spec = detail::probe_window(tf, probe, lambda, h, opt.safety);
    const ScalarGrid g = sample(tf, spec);
    ScalarGrid t;
    switch (kind) {
        case TransformKind::lower: t = lower_transform(g, lambda); break;
        case TransformKind::upper: t = upper_transform(g, lambda); break;
        default: throw std::invalid_argument("gradient_at_probe: kind must be lower or upper");
    }
    const auto strides = strides_of(t.dims);
    std::vector<std::size_t> centre(spec.dims.size());
    for (std::size_t a = 0; a < spec.dims.size(); ++a) centre[a] = spec.dims[a] / 2;
    std::vector<double> grad(spec.dims.size());
    const std::size_t flat = flatten(centre, strides);
    for (std::size_t a = 0; a < spec.dims.size(); ++a)
        grad[a] = (t.values[flat + strides[a]] - t.values[flat - strides[a]]) / (2.0 * h);
    return grad;
}

struct GradientLipschitzReport {
    double max_ratio = 0.0;
    double bound = 0.0;  // 2 * lambda
    double slack = 1.05;
    bool ok = false;
};

/// The upper transform has gradients that vary at most 2*lambda per unit
/// distance. Checks the discrete analogue on central-difference gradients
/// over adjacent interior node pairs, with 5% slack by default.
inline GradientLipschitzReport gradient_lipschitz_check(const ScalarGrid& f, double lambda, double slack = 1.05) {
    detail::require_lambda(lambda, "gradient_lipschitz_check");
    const std::vector<ScalarGrid> grads = gradient_upper(f, lambda);
    GradientLipschitzReport rep;
    rep.bound = 2.0 * lambda;
    rep.slack = slack;
    const auto strides = strides_of(f.dims);
    const std::size_t n = node_count(f.dims);
    auto usable = [&](const std::vector<std::size_t>& idx) {
        for (const ScalarGrid& g : grads)
            if (!is_valid_node(g, idx)) return false;
        return true;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = unflatten(i, f.dims);
        if (!usable(idx)) continue;
        for (std::size_t a = 0; a < f.dims.size(); ++a) {
            if (idx[a] + 1 >= f.dims[a]) continue;
            auto jdx = idx;
            ++jdx[a];
            if (!usable(jdx)) continue;
            const std::size_t j = i + strides[a];
            double diff2 = 0.0;
            for (const ScalarGrid& g : grads) {
                const double d = g.values[j] - g.values[i];
                diff2 += d * d;
            }
            rep.max_ratio = std::max(rep.max_ratio, std::sqrt(diff2) / f.spacing[a]);
        }
    }
    rep.ok = rep.max_ratio <= rep.bound * slack;
    return rep;
}

struct DcEdgeReport {
    Point probe;
    std::vector<double> lambdas;
    std::vector<double> values;
    double liminf_estimate = 0.0;
    double bound = 0.0;     // (r_g - r_h)^2 / 4
    double radius_g = 0.0;
    double radius_h = 0.0;
    bool ok = false;
    std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const DcEdgeReport& r) {
    nlohmann::json j;
    j["probe"] = r.probe;
    j["lambdas"] = r.lambdas;
    j["values"] = r.values;
    j["liminf_estimate"] = r.liminf_estimate;
    j["bound"] = r.bound;
    j["radius_g"] = r.radius_g;
    j["radius_h"] = r.radius_h;
    j["ok"] = r.ok;
    j["warnings"] = r.warnings;
    return j;
}

/// For f = g - h with convex g, h: the scale-1 edge landscape of f at a probe
/// eventually dominates (r_g - r_h)^2/4, where r_g, r_h are the minisphere
/// radii of the two subdifferentials. The liminf is estimated as the minimum
/// over the tail half of the sweep.
inline DcEdgeReport dc_edge_bound(const TestFunctionRef& g, const TestFunctionRef& h, const Point& probe,
                                  const std::vector<double>& lambdas, double tol = 0.01,
                                  const SweepOptions& opt = {}) {
    const TestFunctionRef f = make_dc(g, h);  // validates convexity of both parts
    const LandscapePrediction pg = predicted_landscape(*g, probe);
    const LandscapePrediction ph = predicted_landscape(*h, probe);
    SweepReport sweep = landscape_sweep(*f, probe, lambdas, SingularityKind::edge, opt);
    DcEdgeReport rep;
    rep.probe = probe;
    rep.lambdas = sweep.lambdas;
    rep.values = sweep.values;
    rep.warnings = sweep.warnings;
    rep.radius_g = pg.sphere.radius;
    rep.radius_h = ph.sphere.radius;
    const double dr = rep.radius_g - rep.radius_h;
    rep.bound = 0.25 * dr * dr;
    const std::size_t n = rep.values.size();
    const std::size_t tail = (n + 1) / 2;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = n - tail; i < n; ++i) lo = std::min(lo, rep.values[i]);
    rep.liminf_estimate = lo;
    rep.ok = rep.liminf_estimate >= rep.bound - tol;
    return rep;
}

}  // namespace ccx
