#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccx/grid.hpp"
#include "ccx/minisphere.hpp"

namespace ccx {

/// Closed-form test functions with known singular structure. Combinators keep
/// the tree immutable and shareable.
struct TestFunction {
    enum class Type {
        abs_value,        // |x| on R
        relu,             // max(x, 0) on R
        sublinear,        // max over vertices p of S of p.x
        dist_points,      // min_i |x - k_i|
        sq_dist_points,   // min_i |x - k_i|^2
        weighted_sq_dist, // min_i w_i |x - k_i|^2 + b_i
        dc_pair,          // g - h, both convex
        sum,
        scale,
        translate,
        square,           // |x|^2
        affine            // a.x + b
    };

    Type type = Type::abs_value;
    int dim = 1;
    std::vector<Point> points;                                  // S or K
    std::vector<double> weights;                                // weighted_sq_dist
    std::vector<double> offsets;                                // weighted_sq_dist
    std::vector<double> lin;                                    // affine slope
    double constant = 0.0;                                      // affine offset
    double factor = 1.0;                                        // scale
    std::vector<double> shift;                                  // translate
    std::vector<std::shared_ptr<const TestFunction>> parts;     // children
};

using TestFunctionRef = std::shared_ptr<const TestFunction>;

enum class ConvexityClass { convex, concave, semiconvex_linear, semiconcave_linear, dc, smooth };

struct SubdifferentialResult {
    Polytope polytope;
    bool super = false;    // true: superdifferential (semiconcave side)
    bool singular = false; // more than one distinct vertex
};

namespace detail {

inline double norm2(const Point& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

inline void require_dim(const TestFunction& f, const Point& x) {
    if (static_cast<int>(x.size()) != f.dim) throw std::invalid_argument("oracle: point dimension mismatch");
}

inline void validate_site_list(const std::vector<Point>& pts, int dim, const char* who) {
    if (pts.empty()) throw std::invalid_argument(std::string(who) + ": empty point list");
    for (const Point& p : pts) {
        if (static_cast<int>(p.size()) != dim) throw std::invalid_argument(std::string(who) + ": mixed dimensions");
        for (double v : p)
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
    }
}

}  // namespace detail

inline TestFunctionRef make_abs() {
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::abs_value;
    f->dim = 1;
    return f;
}

inline TestFunctionRef make_relu() {
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::relu;
    f->dim = 1;
    return f;
}

inline TestFunctionRef make_square(int dim = 1) {
    if (dim < 1) throw std::invalid_argument("make_square: bad dimension");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::square;
    f->dim = dim;
    return f;
}

inline TestFunctionRef make_affine(std::vector<double> a, double b) {
    if (a.empty()) throw std::invalid_argument("make_affine: empty slope");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::affine;
    f->dim = static_cast<int>(a.size());
    f->lin = std::move(a);
    f->constant = b;
    return f;
}

inline TestFunctionRef make_sublinear(std::vector<Point> vertices) {
    if (vertices.empty()) throw std::invalid_argument("make_sublinear: empty vertex set");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::sublinear;
    f->dim = static_cast<int>(vertices.front().size());
    detail::validate_site_list(vertices, f->dim, "make_sublinear");
    f->points = std::move(vertices);
    return f;
}

inline TestFunctionRef make_dist(std::vector<Point> sites) {
    if (sites.empty()) throw std::invalid_argument("make_dist: empty site set");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::dist_points;
    f->dim = static_cast<int>(sites.front().size());
    detail::validate_site_list(sites, f->dim, "make_dist");
    f->points = std::move(sites);
    return f;
}

inline TestFunctionRef make_sq_dist(std::vector<Point> sites) {
    if (sites.empty()) throw std::invalid_argument("make_sq_dist: empty site set");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::sq_dist_points;
    f->dim = static_cast<int>(sites.front().size());
    detail::validate_site_list(sites, f->dim, "make_sq_dist");
    f->points = std::move(sites);
    return f;
}

inline TestFunctionRef make_weighted_sq_dist(std::vector<Point> sites, std::vector<double> weights,
                                             std::vector<double> offsets) {
    if (sites.empty()) throw std::invalid_argument("make_weighted_sq_dist: empty site set");
    if (weights.size() != sites.size() || offsets.size() != sites.size())
        throw std::invalid_argument("make_weighted_sq_dist: weights/offsets size mismatch");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("make_weighted_sq_dist: weights must be positive");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::weighted_sq_dist;
    f->dim = static_cast<int>(sites.front().size());
    detail::validate_site_list(sites, f->dim, "make_weighted_sq_dist");
    f->points = std::move(sites);
    f->weights = std::move(weights);
    f->offsets = std::move(offsets);
    return f;
}

inline bool is_convex(const TestFunction& f);

inline TestFunctionRef make_dc(TestFunctionRef g, TestFunctionRef h) {
    if (!g || !h) throw std::invalid_argument("make_dc: null part");
    if (g->dim != h->dim) throw std::invalid_argument("make_dc: dimension mismatch");
    if (!is_convex(*g) || !is_convex(*h)) throw std::invalid_argument("make_dc: both parts must be convex");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::dc_pair;
    f->dim = g->dim;
    f->parts = {std::move(g), std::move(h)};
    return f;
}

inline TestFunctionRef make_sum(std::vector<TestFunctionRef> terms) {
    if (terms.empty()) throw std::invalid_argument("make_sum: no terms");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::sum;
    f->dim = terms.front()->dim;
    for (const auto& t : terms)
        if (!t || t->dim != f->dim) throw std::invalid_argument("make_sum: dimension mismatch");
    f->parts.assign(terms.begin(), terms.end());
    return f;
}

inline TestFunctionRef make_scale(double c, TestFunctionRef inner) {
    if (!inner) throw std::invalid_argument("make_scale: null part");
    if (!std::isfinite(c) || c == 0.0) throw std::invalid_argument("make_scale: factor must be finite and nonzero");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::scale;
    f->dim = inner->dim;
    f->factor = c;
    f->parts = {std::move(inner)};
    return f;
}

inline TestFunctionRef make_translate(std::vector<double> shift, TestFunctionRef inner) {
    if (!inner) throw std::invalid_argument("make_translate: null part");
    if (static_cast<int>(shift.size()) != inner->dim) throw std::invalid_argument("make_translate: shift dimension mismatch");
    auto f = std::make_shared<TestFunction>();
    f->type = TestFunction::Type::translate;
    f->dim = inner->dim;
    f->shift = std::move(shift);
    f->parts = {std::move(inner)};
    return f;
}

inline double evaluate(const TestFunction& f, const Point& x) {
    detail::require_dim(f, x);
    switch (f.type) {
        case TestFunction::Type::abs_value:
            return std::abs(x[0]);
        case TestFunction::Type::relu:
            return std::max(x[0], 0.0);
        case TestFunction::Type::square: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
        }
        case TestFunction::Type::affine: {
            double s = f.constant;
            for (std::size_t i = 0; i < x.size(); ++i) s += f.lin[i] * x[i];
            return s;
        }
        case TestFunction::Type::sublinear: {
            double best = -std::numeric_limits<double>::infinity();
            for (const Point& p : f.points) {
                double s = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * x[i];
                best = std::max(best, s);
            }
            return best;
        }
        case TestFunction::Type::dist_points: {
            double best = std::numeric_limits<double>::infinity();
            for (const Point& k : f.points) best = std::min(best, detail::dist2(k, x));
            return std::sqrt(best);
        }
        case TestFunction::Type::sq_dist_points: {
            double best = std::numeric_limits<double>::infinity();
            for (const Point& k : f.points) best = std::min(best, detail::dist2(k, x));
            return best;
        }
        case TestFunction::Type::weighted_sq_dist: {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < f.points.size(); ++i)
                best = std::min(best, f.weights[i] * detail::dist2(f.points[i], x) + f.offsets[i]);
            return best;
        }
        case TestFunction::Type::dc_pair:
            return evaluate(*f.parts[0], x) - evaluate(*f.parts[1], x);
        case TestFunction::Type::sum: {
            double s = 0.0;
            for (const auto& t : f.parts) s += evaluate(*t, x);
            return s;
        }
        case TestFunction::Type::scale:
            return f.factor * evaluate(*f.parts[0], x);
        case TestFunction::Type::translate: {
            Point y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - f.shift[i];
            return evaluate(*f.parts[0], y);
        }
    }
    throw std::logic_error("evaluate: unreachable");
}

/// Upper bound on the Lipschitz constant over the closed ball B(centre, radius).
inline double lipschitz_bound(const TestFunction& f, const Point& centre, double radius) {
    detail::require_dim(f, centre);
    if (!(radius >= 0.0)) throw std::invalid_argument("lipschitz_bound: negative radius");
    switch (f.type) {
        case TestFunction::Type::abs_value:
        case TestFunction::Type::relu:
        case TestFunction::Type::dist_points:
            return 1.0;
        case TestFunction::Type::square:
            return 2.0 * (detail::norm2(centre) + radius);
        case TestFunction::Type::affine:
            return detail::norm2(f.lin);
        case TestFunction::Type::sublinear: {
            double best = 0.0;
            for (const Point& p : f.points) best = std::max(best, detail::norm2(p));
            return best;
        }
        case TestFunction::Type::sq_dist_points: {
            double nearest = std::numeric_limits<double>::infinity();
            for (const Point& k : f.points) nearest = std::min(nearest, std::sqrt(detail::dist2(k, centre)));
            return 2.0 * (nearest + radius);
        }
        case TestFunction::Type::weighted_sq_dist: {
            double best = 0.0;
            for (std::size_t i = 0; i < f.points.size(); ++i)
                best = std::max(best, 2.0 * f.weights[i] * (std::sqrt(detail::dist2(f.points[i], centre)) + radius));
            return best;
        }
        case TestFunction::Type::dc_pair:
            return lipschitz_bound(*f.parts[0], centre, radius) + lipschitz_bound(*f.parts[1], centre, radius);
        case TestFunction::Type::sum: {
            double s = 0.0;
            for (const auto& t : f.parts) s += lipschitz_bound(*t, centre, radius);
            return s;
        }
        case TestFunction::Type::scale:
            return std::abs(f.factor) * lipschitz_bound(*f.parts[0], centre, radius);
        case TestFunction::Type::translate: {
            Point y(centre.size());
            for (std::size_t i = 0; i < centre.size(); ++i) y[i] = centre[i] - f.shift[i];
            return lipschitz_bound(*f.parts[0], y, radius);
        }
    }
    throw std::logic_error("lipschitz_bound: unreachable");
}

inline bool is_convex(const TestFunction& f) {
    switch (f.type) {
        case TestFunction::Type::abs_value:
        case TestFunction::Type::relu:
        case TestFunction::Type::sublinear:
        case TestFunction::Type::square:
        case TestFunction::Type::affine:
            return true;
        case TestFunction::Type::dist_points:
        case TestFunction::Type::sq_dist_points:
        case TestFunction::Type::weighted_sq_dist:
            return f.points.size() == 1;  // a single site keeps the min trivial
        case TestFunction::Type::dc_pair:
            return false;
        case TestFunction::Type::sum: {
            for (const auto& t : f.parts)
                if (!is_convex(*t)) return false;
            return true;
        }
        case TestFunction::Type::scale:
            return f.factor > 0.0 ? is_convex(*f.parts[0]) : false;
        case TestFunction::Type::translate:
            return is_convex(*f.parts[0]);
    }
    return false;
}

inline ConvexityClass convexity_flag(const TestFunction& f);

/// Semiconvexity/semiconcavity modulus where a single global constant exists:
/// f +/- lambda0 |x|^2 convex/concave with linear modulus. nullopt when only a
/// local constant makes sense (plain distance functions) or for dc pairs.
inline std::optional<double> lambda0(const TestFunction& f) {
    switch (f.type) {
        case TestFunction::Type::abs_value:
        case TestFunction::Type::relu:
        case TestFunction::Type::sublinear:
        case TestFunction::Type::square:
        case TestFunction::Type::affine:
            return 0.0;
        case TestFunction::Type::sq_dist_points:
            return f.points.size() == 1 ? 0.0 : 1.0;
        case TestFunction::Type::weighted_sq_dist: {
            double w = 0.0;
            for (double v : f.weights) w = std::max(w, v);
            return f.points.size() == 1 ? 0.0 : w;
        }
        case TestFunction::Type::dist_points:
            return f.points.size() == 1 ? std::optional<double>(0.0) : std::nullopt;
        case TestFunction::Type::dc_pair:
            return std::nullopt;
        case TestFunction::Type::sum: {
            // A single constant only makes sense when the terms share a side:
            // all convex, or all semiconcave with known constants.
            bool all_convex = true, all_super = true;
            double s = 0.0;
            for (const auto& t : f.parts) {
                if (!is_convex(*t)) all_convex = false;
                const ConvexityClass c = convexity_flag(*t);
                if (c != ConvexityClass::semiconcave_linear && c != ConvexityClass::concave) all_super = false;
                auto l = lambda0(*t);
                if (!l) return std::nullopt;
                s += *l;
            }
            if (all_convex) return 0.0;
            if (all_super) return s;
            return std::nullopt;
        }
        case TestFunction::Type::scale: {
            auto l = lambda0(*f.parts[0]);
            if (!l) return std::nullopt;
            return std::abs(f.factor) * *l;
        }
        case TestFunction::Type::translate:
            return lambda0(*f.parts[0]);
    }
    return std::nullopt;
}

inline ConvexityClass convexity_flag(const TestFunction& f) {
    switch (f.type) {
        case TestFunction::Type::square:
        case TestFunction::Type::affine:
            return ConvexityClass::smooth;
        case TestFunction::Type::abs_value:
        case TestFunction::Type::relu:
        case TestFunction::Type::sublinear:
            return ConvexityClass::convex;
        case TestFunction::Type::dist_points:
        case TestFunction::Type::sq_dist_points:
        case TestFunction::Type::weighted_sq_dist:
            return f.points.size() == 1 ? ConvexityClass::convex : ConvexityClass::semiconcave_linear;
        case TestFunction::Type::dc_pair:
            return ConvexityClass::dc;
        case TestFunction::Type::sum:
        case TestFunction::Type::scale:
        case TestFunction::Type::translate: {
            if (is_convex(f)) return ConvexityClass::convex;
            if (f.type == TestFunction::Type::scale && f.factor < 0.0) {
                const ConvexityClass inner = convexity_flag(*f.parts[0]);
                if (inner == ConvexityClass::convex) return ConvexityClass::concave;
                if (inner == ConvexityClass::semiconcave_linear) return ConvexityClass::semiconvex_linear;
                if (inner == ConvexityClass::smooth) return ConvexityClass::smooth;
            }
            if (f.type == TestFunction::Type::translate) return convexity_flag(*f.parts[0]);
            if (f.type == TestFunction::Type::sum) {
                bool all_semiconcave = true;
                for (const auto& t : f.parts) {
                    const ConvexityClass c = convexity_flag(*t);
                    if (c != ConvexityClass::semiconcave_linear && c != ConvexityClass::concave) all_semiconcave = false;
                }
                if (all_semiconcave) return ConvexityClass::semiconcave_linear;
            }
            return ConvexityClass::dc;
        }
        default:
            return ConvexityClass::dc;
    }
}

namespace detail {

inline void append_unique_vertex(std::vector<Point>& vs, Point p) {
    for (const Point& q : vs)
        if (dist2(q, p) < 1e-24) return;
    vs.push_back(std::move(p));
}

}  // namespace detail

/// One-sided differential at x: the vertex set spanning the subdifferential
/// (convex-type oracles) or superdifferential (semiconcave oracles). Throws
/// std::domain_error where the notion is undefined: dc pairs everywhere, the
/// plain distance function on its sites.
inline SubdifferentialResult subdifferential(const TestFunction& f, const Point& x) {
    detail::require_dim(f, x);
    const double active_tol = 1e-9;
    SubdifferentialResult r;
    switch (f.type) {
        case TestFunction::Type::abs_value: {
            if (std::abs(x[0]) <= active_tol) {
                r.polytope.vertices = {{-1.0}, {1.0}};
            } else {
                r.polytope.vertices = {{x[0] > 0.0 ? 1.0 : -1.0}};
            }
            break;
        }
        case TestFunction::Type::relu: {
            if (std::abs(x[0]) <= active_tol) {
                r.polytope.vertices = {{0.0}, {1.0}};
            } else {
                r.polytope.vertices = {{x[0] > 0.0 ? 1.0 : 0.0}};
            }
            break;
        }
        case TestFunction::Type::square: {
            Point g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
            r.polytope.vertices = {std::move(g)};
            break;
        }
        case TestFunction::Type::affine:
            r.polytope.vertices = {f.lin};
            break;
        case TestFunction::Type::sublinear: {
            double best = -std::numeric_limits<double>::infinity();
            std::vector<double> vals(f.points.size());
            for (std::size_t i = 0; i < f.points.size(); ++i) {
                double s = 0.0;
                for (std::size_t c = 0; c < x.size(); ++c) s += f.points[i][c] * x[c];
                vals[i] = s;
                best = std::max(best, s);
            }
            const double tol = active_tol * (1.0 + std::abs(best));
            for (std::size_t i = 0; i < f.points.size(); ++i)
                if (vals[i] >= best - tol) detail::append_unique_vertex(r.polytope.vertices, f.points[i]);
            break;
        }
        case TestFunction::Type::dist_points: {
            double dmin = std::numeric_limits<double>::infinity();
            for (const Point& k : f.points) dmin = std::min(dmin, std::sqrt(detail::dist2(k, x)));
            if (dmin <= 1e-12)
                throw std::domain_error("subdifferential: distance oracle has no superdifferential on a site");
            const double tol = active_tol * (1.0 + dmin);
            for (const Point& k : f.points) {
                const double d = std::sqrt(detail::dist2(k, x));
                if (d <= dmin + tol) {
                    Point g(x.size());
                    for (std::size_t c = 0; c < x.size(); ++c) g[c] = (x[c] - k[c]) / d;
                    detail::append_unique_vertex(r.polytope.vertices, std::move(g));
                }
            }
            r.super = f.points.size() > 1;
            break;
        }
        case TestFunction::Type::sq_dist_points: {
            double dmin = std::numeric_limits<double>::infinity();
            for (const Point& k : f.points) dmin = std::min(dmin, std::sqrt(detail::dist2(k, x)));
            const double tol = active_tol * (1.0 + dmin);
            for (const Point& k : f.points) {
                if (std::sqrt(detail::dist2(k, x)) <= dmin + tol) {
                    Point g(x.size());
                    for (std::size_t c = 0; c < x.size(); ++c) g[c] = 2.0 * (x[c] - k[c]);
                    detail::append_unique_vertex(r.polytope.vertices, std::move(g));
                }
            }
            r.super = f.points.size() > 1;
            break;
        }
        case TestFunction::Type::weighted_sq_dist: {
            double vmin = std::numeric_limits<double>::infinity();
            std::vector<double> vals(f.points.size());
            for (std::size_t i = 0; i < f.points.size(); ++i) {
                vals[i] = f.weights[i] * detail::dist2(f.points[i], x) + f.offsets[i];
                vmin = std::min(vmin, vals[i]);
            }
            const double tol = active_tol * (1.0 + std::abs(vmin));
            for (std::size_t i = 0; i < f.points.size(); ++i) {
                if (vals[i] <= vmin + tol) {
                    Point g(x.size());
                    for (std::size_t c = 0; c < x.size(); ++c) g[c] = 2.0 * f.weights[i] * (x[c] - f.points[i][c]);
                    detail::append_unique_vertex(r.polytope.vertices, std::move(g));
                }
            }
            r.super = f.points.size() > 1;
            break;
        }
        case TestFunction::Type::dc_pair:
            throw std::domain_error("subdifferential: undefined for dc pairs; query the convex parts");
        case TestFunction::Type::sum: {
            // Minkowski sum of the parts' differentials. Singleton parts are
            // gradients and combine with either side; genuinely set-valued
            // parts must agree on the side.
            SubdifferentialResult acc = subdifferential(*f.parts[0], x);
            bool saw_sub = acc.polytope.vertices.size() > 1 && !acc.super;
            bool saw_super = acc.polytope.vertices.size() > 1 && acc.super;
            for (std::size_t t = 1; t < f.parts.size(); ++t) {
                SubdifferentialResult nxt = subdifferential(*f.parts[t], x);
                if (nxt.polytope.vertices.size() > 1) {
                    (nxt.super ? saw_super : saw_sub) = true;
                    if (saw_sub && saw_super)
                        throw std::domain_error("subdifferential: sum mixes sub- and superdifferentials");
                }
                std::vector<Point> merged;
                for (const Point& a : acc.polytope.vertices) {
                    for (const Point& b : nxt.polytope.vertices) {
                        Point v(a.size());
                        for (std::size_t c = 0; c < a.size(); ++c) v[c] = a[c] + b[c];
                        detail::append_unique_vertex(merged, std::move(v));
                    }
                }
                if (merged.size() > 128) throw std::domain_error("subdifferential: sum vertex set too large");
                acc.polytope.vertices = std::move(merged);
            }
            acc.super = saw_super;
            r = std::move(acc);
            break;
        }
        case TestFunction::Type::scale: {
            r = subdifferential(*f.parts[0], x);
            for (Point& v : r.polytope.vertices)
                for (double& c : v) c *= f.factor;
            if (f.factor < 0.0) r.super = !r.super;
            break;
        }
        case TestFunction::Type::translate: {
            Point y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - f.shift[i];
            r = subdifferential(*f.parts[0], y);
            break;
        }
    }
    r.singular = r.polytope.vertices.size() > 1;
    return r;
}

inline ScalarGrid sample(const TestFunction& f, const GridSpec& spec) {
    if (static_cast<int>(spec.dims.size()) != f.dim) throw std::invalid_argument("sample: grid/oracle dimension mismatch");
    return sample_grid(spec, [&](const std::vector<double>& x) { return evaluate(f, x); });
}

struct LandscapePrediction {
    Sphere sphere;  // minisphere of the one-sided differential at the probe
    double limit = 0.0;  // r^2 / 4
    bool super = false;
};

/// Predicted large-lambda landscape at a probe: the scale-1 valley (convex
/// side) or ridge (semiconcave side) tends to r^2/4 where r is the radius of
/// the minimal sphere of the one-sided differential, and the transform
/// gradient tends to the sphere's centre.
inline LandscapePrediction predicted_landscape(const TestFunction& f, const Point& x) {
    const SubdifferentialResult sd = subdifferential(f, x);
    LandscapePrediction p;
    p.sphere = min_bounding_sphere(sd.polytope.vertices);
    p.limit = 0.25 * p.sphere.radius * p.sphere.radius;
    p.super = sd.super;
    return p;
}

struct MedialLimit {
    double sq_dist = 0.0;       // dist^2(x, K)
    double sq_dist_hull = 0.0;  // dist^2(x, co[K(x)])
    double limit = 0.0;         // sq_dist - sq_dist_hull
    double ratio = 0.0;         // limit / sq_dist (0 on K)
    Point projection;           // nearest point of co[K(x)]
    Point direction;            // (x - projection) / dist(x, K), zero on K
};

/// Closed-form limit of the scaled medial landscape for a finite site set:
/// dist^2 to the sites minus dist^2 to the convex hull of the active sites.
inline MedialLimit medial_limit_formula(const std::vector<Point>& sites, const Point& x) {
    detail::validate_points(sites, "medial_limit_formula");
    if (x.size() != sites.front().size()) throw std::invalid_argument("medial_limit_formula: dimension mismatch");
    MedialLimit out;
    double dmin = std::numeric_limits<double>::infinity();
    for (const Point& k : sites) dmin = std::min(dmin, std::sqrt(detail::dist2(k, x)));
    out.sq_dist = dmin * dmin;
    const double tol = 1e-9 * (1.0 + dmin);
    std::vector<Point> active;
    for (const Point& k : sites)
        if (std::sqrt(detail::dist2(k, x)) <= dmin + tol) active.push_back(k);
    const HullProjection proj = detail::project_onto_hull(active, x);
    out.projection = proj.point;
    out.sq_dist_hull = proj.distance * proj.distance;
    out.limit = std::max(0.0, out.sq_dist - out.sq_dist_hull);
    out.direction.assign(x.size(), 0.0);
    if (dmin > 1e-12) {
        out.ratio = out.limit / out.sq_dist;
        for (std::size_t c = 0; c < x.size(); ++c) out.direction[c] = (x[c] - proj.point[c]) / dmin;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization of oracle specs.

inline nlohmann::json to_json(const TestFunction& f) {
    using nlohmann::json;
    json j;
    switch (f.type) {
        case TestFunction::Type::abs_value: j["type"] = "abs"; break;
        case TestFunction::Type::relu: j["type"] = "relu"; break;
        case TestFunction::Type::sublinear: j["type"] = "sublinear"; j["S"] = f.points; break;
        case TestFunction::Type::dist_points: j["type"] = "dist"; j["K"] = f.points; break;
        case TestFunction::Type::sq_dist_points: j["type"] = "sqdist"; j["K"] = f.points; break;
        case TestFunction::Type::weighted_sq_dist:
            j["type"] = "wsqdist";
            j["K"] = f.points;
            j["w"] = f.weights;
            j["b"] = f.offsets;
            break;
        case TestFunction::Type::dc_pair:
            j["type"] = "dc";
            j["g"] = to_json(*f.parts[0]);
            j["h"] = to_json(*f.parts[1]);
            break;
        case TestFunction::Type::sum: {
            j["type"] = "sum";
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& t : f.parts) terms.push_back(to_json(*t));
            j["terms"] = std::move(terms);
            break;
        }
        case TestFunction::Type::scale:
            j["type"] = "scale";
            j["c"] = f.factor;
            j["f"] = to_json(*f.parts[0]);
            break;
        case TestFunction::Type::translate:
            j["type"] = "translate";
            j["shift"] = f.shift;
            j["f"] = to_json(*f.parts[0]);
            break;
        case TestFunction::Type::square:
            j["type"] = "square";
            if (f.dim != 1) j["dim"] = f.dim;
            break;
        case TestFunction::Type::affine:
            j["type"] = "affine";
            j["a"] = f.lin;
            j["b"] = f.constant;
            break;
    }
    return j;
}

inline std::vector<Point> parse_point_list(const nlohmann::json& j, const char* who) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(who) + ": expected a nonempty array of points");
    std::vector<Point> pts;
    for (const auto& e : j) {
        if (e.is_number()) {
            pts.push_back({e.get<double>()});
        } else if (e.is_array()) {
            pts.push_back(e.get<Point>());
        } else {
            throw std::invalid_argument(std::string(who) + ": bad point entry");
        }
    }
    return pts;
}

inline TestFunctionRef test_function_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw std::invalid_argument("oracle spec: missing \"type\"");
    const std::string t = j["type"].get<std::string>();
    if (t == "abs") return make_abs();
    if (t == "relu") return make_relu();
    if (t == "square") return make_square(j.value("dim", 1));
    if (t == "affine") {
        if (!j.contains("a")) throw std::invalid_argument("oracle spec: affine needs \"a\"");
        std::vector<double> a = j["a"].is_number() ? std::vector<double>{j["a"].get<double>()}
                                                   : j["a"].get<std::vector<double>>();
        return make_affine(std::move(a), j.value("b", 0.0));
    }
    if (t == "sublinear" || t == "sublin") {
        if (!j.contains("S")) throw std::invalid_argument("oracle spec: sublinear needs \"S\"");
        return make_sublinear(parse_point_list(j["S"], "sublinear"));
    }
    if (t == "dist" || t == "dist_to_points") {
        if (!j.contains("K")) throw std::invalid_argument("oracle spec: dist needs \"K\"");
        return make_dist(parse_point_list(j["K"], "dist"));
    }
    if (t == "sqdist" || t == "sq_dist_to_points") {
        if (!j.contains("K")) throw std::invalid_argument("oracle spec: sqdist needs \"K\"");
        return make_sq_dist(parse_point_list(j["K"], "sqdist"));
    }
    if (t == "wsqdist" || t == "weighted_sq_dist") {
        if (!j.contains("K") || !j.contains("w") || !j.contains("b"))
            throw std::invalid_argument("oracle spec: wsqdist needs \"K\", \"w\", \"b\"");
        return make_weighted_sq_dist(parse_point_list(j["K"], "wsqdist"), j["w"].get<std::vector<double>>(),
                                     j["b"].get<std::vector<double>>());
    }
    if (t == "dc" || t == "dc_pair") {
        if (!j.contains("g") || !j.contains("h")) throw std::invalid_argument("oracle spec: dc needs \"g\" and \"h\"");
        return make_dc(test_function_from_json(j["g"]), test_function_from_json(j["h"]));
    }
    if (t == "sum") {
        if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
            throw std::invalid_argument("oracle spec: sum needs \"terms\"");
        std::vector<TestFunctionRef> terms;
        for (const auto& e : j["terms"]) terms.push_back(test_function_from_json(e));
        return make_sum(std::move(terms));
    }
    if (t == "scale") {
        if (!j.contains("c") || !j.contains("f")) throw std::invalid_argument("oracle spec: scale needs \"c\" and \"f\"");
        return make_scale(j["c"].get<double>(), test_function_from_json(j["f"]));
    }
    if (t == "translate") {
        if (!j.contains("shift") || !j.contains("f"))
            throw std::invalid_argument("oracle spec: translate needs \"shift\" and \"f\"");
        std::vector<double> s = j["shift"].is_number() ? std::vector<double>{j["shift"].get<double>()}
                                                       : j["shift"].get<std::vector<double>>();
        return make_translate(std::move(s), test_function_from_json(j["f"]));
    }
    throw std::invalid_argument("oracle spec: unknown type \"" + t + "\"");
}

}  // namespace ccx
