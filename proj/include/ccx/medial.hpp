#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccx/envelope.hpp"
#include "ccx/grid.hpp"
#include "ccx/oracle.hpp"
#include "ccx/singularity.hpp"
#include "ccx/transforms.hpp"

namespace ccx {

struct SiteSet {
    std::vector<Point> points;
};

/// Nonzero grid values become sites at their node coordinates.
inline SiteSet sites_from_mask(const ScalarGrid& mask) {
    validate_grid(mask);
    SiteSet sites;
    const std::size_t n = node_count(mask.dims);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.values[i] != 0.0) sites.points.push_back(node_coord(mask, unflatten(i, mask.dims)));
    }
    if (sites.points.empty()) throw std::invalid_argument("sites_from_mask: mask has no nonzero cells");
    return sites;
}

namespace detail {

inline void validate_sites(const SiteSet& sites, std::size_t dim) {
    if (sites.points.empty()) throw std::invalid_argument("site set is empty");
    for (const Point& p : sites.points) {
        if (p.size() != dim) throw std::invalid_argument("site dimension mismatch");
        for (double c : p)
            if (!std::isfinite(c)) throw std::invalid_argument("site has non-finite coordinate");
    }
}

inline bool sites_on_nodes(const SiteSet& sites, const GridSpec& spec, std::vector<std::size_t>& flats) {
    flats.clear();
    const auto strides = strides_of(spec.dims);
    for (const Point& p : sites.points) {
        std::vector<std::size_t> idx(spec.dims.size());
        for (std::size_t a = 0; a < spec.dims.size(); ++a) {
            const double t = (p[a] - spec.origin[a]) / spec.spacing[a];
            const double rt = std::round(t);
            if (std::abs(t - rt) > 1e-9 || rt < 0.0 || rt > static_cast<double>(spec.dims[a] - 1)) return false;
            idx[a] = static_cast<std::size_t>(rt);
        }
        flats.push_back(flatten(idx, strides));
    }
    return true;
}

}  // namespace detail

/// Squared Euclidean distance to the site set, sampled on the grid. Sites
/// that all fall on grid nodes go through the separable parabola sweep
/// (exact); otherwise each node takes a direct minimum over sites.
inline ScalarGrid sq_distance_transform(const SiteSet& sites, const GridSpec& spec) {
    validate_spec(spec);
    detail::validate_sites(sites, spec.dims.size());
    ScalarGrid g = make_grid(spec, 0.0);
    std::vector<std::size_t> flats;
    if (detail::sites_on_nodes(sites, spec, flats)) {
        std::fill(g.values.begin(), g.values.end(), std::numeric_limits<double>::infinity());
        for (std::size_t f : flats) g.values[f] = 0.0;
        detail::axis_parabola_sweeps(g.values, g.dims, g.spacing, 1.0);
        return g;
    }
    const std::size_t n = node_count(spec.dims);
    parallel_for(n, [&](std::size_t i) {
        const auto idx = unflatten(i, spec.dims);
        const Point x = node_coord(g, idx);
        double best = std::numeric_limits<double>::infinity();
        for (const Point& p : sites.points) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                const double d = x[a] - p[a];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        g.values[i] = best;
    });
    return g;
}

/// Medial-axis landscape of a site set: (1 + lambda) * ridge of the squared
/// distance transform. Zero on and near the sites, and in the limit equal to
/// the squared distance shortfall between the set and its local convex hull.
inline ScalarGrid medial_axis_map(const SiteSet& sites, double lambda, const GridSpec& spec) {
    detail::require_lambda(lambda, "medial_axis_map");
    const ScalarGrid d2 = sq_distance_transform(sites, spec);
    ScalarGrid m = singular_map(d2, lambda, SingularityKind::ridge);
    for (double& v : m.values) v *= 1.0 + lambda;
    return m;
}

struct MedialQuotientReport {
    Point probe;
    SweepReport dist_sweep;
    SweepReport sqdist_sweep;
    double sq_dist = 0.0;       // squared distance from probe to the sites
    double quotient_lhs = 0.0;  // limit of the distance landscape
    double quotient_rhs = 0.0;  // limit of the squared-distance landscape / (4 d^2)
    bool quotient_ok = false;
    std::vector<double> grad_dist;           // gradient of the lower transform of dist
    std::vector<double> grad_sqdist_scaled;  // same for dist^2, divided by 2 dist
    double gradient_gap = 0.0;
    bool gradient_ok = false;
    bool ok = false;
};

inline nlohmann::json to_json(const MedialQuotientReport& r) {
    nlohmann::json j;
    j["probe"] = r.probe;
    j["dist_sweep"] = to_json(r.dist_sweep);
    j["sqdist_sweep"] = to_json(r.sqdist_sweep);
    j["sq_dist"] = r.sq_dist;
    j["quotient_lhs"] = r.quotient_lhs;
    j["quotient_rhs"] = r.quotient_rhs;
    j["quotient_ok"] = r.quotient_ok;
    j["grad_dist"] = r.grad_dist;
    j["grad_sqdist_scaled"] = r.grad_sqdist_scaled;
    j["gradient_gap"] = r.gradient_gap;
    j["gradient_ok"] = r.gradient_ok;
    j["ok"] = r.ok;
    return j;
}

/// Cross-checks the two medial landscapes at a probe off the site set:
/// the ridge limit of dist(.,K) equals the ridge limit of dist^2(.,K)
/// divided by 4 dist^2, and the lower-transform gradients are related by the
/// chain rule factor 2 dist. Probes on (or nearly on) a site are rejected.
inline MedialQuotientReport distance_vs_sqdistance_check(const SiteSet& sites, const Point& probe,
                                                         const std::vector<double>& lambdas, double rtol = 0.05,
                                                         const SweepOptions& opt = {}) {
    detail::validate_sites(sites, probe.size());
    const TestFunctionRef fd = make_dist(sites.points);
    const TestFunctionRef fd2 = make_sq_dist(sites.points);
    const double d2 = evaluate(*fd2, probe);
    if (d2 <= 1e-18) throw std::invalid_argument("distance_vs_sqdistance_check: probe lies on a site");

    MedialQuotientReport rep;
    rep.probe = probe;
    rep.sq_dist = d2;
    rep.dist_sweep = landscape_sweep(*fd, probe, lambdas, SingularityKind::ridge, opt);
    rep.sqdist_sweep = landscape_sweep(*fd2, probe, lambdas, SingularityKind::ridge, opt);
    rep.quotient_lhs = rep.dist_sweep.limit_estimate;
    rep.quotient_rhs = rep.sqdist_sweep.limit_estimate / (4.0 * d2);
    rep.quotient_ok = std::abs(rep.quotient_lhs - rep.quotient_rhs) <= rtol * (std::abs(rep.quotient_rhs) + 0.01);

    const double lam = lambdas.back();
    rep.grad_dist = gradient_at_probe(*fd, probe, lam, TransformKind::lower, opt);
    rep.grad_sqdist_scaled = gradient_at_probe(*fd2, probe, lam, TransformKind::lower, opt);
    const double dist = std::sqrt(d2);
    double gap2 = 0.0, norm2 = 0.0;
    for (std::size_t a = 0; a < rep.grad_dist.size(); ++a) {
        rep.grad_sqdist_scaled[a] /= 2.0 * dist;
        const double d = rep.grad_dist[a] - rep.grad_sqdist_scaled[a];
        gap2 += d * d;
        norm2 += rep.grad_dist[a] * rep.grad_dist[a];
    }
    rep.gradient_gap = std::sqrt(gap2);
    rep.gradient_ok = rep.gradient_gap <= rtol * (1.0 + std::sqrt(norm2));
    rep.ok = rep.quotient_ok && rep.gradient_ok;
    return rep;
}

}  // namespace ccx
