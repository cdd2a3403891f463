#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccx {

using Point = std::vector<double>;

/// Finite vertex list; geometric routines treat it as the convex hull of the
/// vertices.
struct Polytope {
    std::vector<Point> vertices;
};

struct Sphere {
    Point centre;
    double radius = -1.0;  // negative marks the empty sphere
    std::vector<std::size_t> support;
};

namespace detail {

inline void validate_points(const std::vector<Point>& pts, const char* who) {
    if (pts.empty()) throw std::invalid_argument(std::string(who) + ": no points");
    const std::size_t d = pts.front().size();
    if (d == 0 || d > 10) throw std::invalid_argument(std::string(who) + ": dimension must be 1..10");
    for (const Point& p : pts) {
        if (p.size() != d) throw std::invalid_argument(std::string(who) + ": mixed dimensions");
        for (double v : p)
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite coordinate");
    }
}

inline double dist2(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Dense solve with partial pivoting; false on (near-)singular systems.
inline bool solve_linear(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-12) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r * n + col] / a[col * n + col];
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= m * a[col * n + c];
            b[r] -= m * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
        b[r] = s / (a[r * n + r]);
    }
    return true;
}

/// Smallest sphere with the given support points on its boundary: the centre
/// lies in their affine hull. Coincident support points are deduplicated
/// first; affinely dependent sets report failure and the caller treats the
/// offending point as enclosed.
inline std::optional<Sphere> sphere_through(const std::vector<Point>& pts, const std::vector<std::size_t>& support) {
    Sphere s;
    s.support = support;
    if (support.empty()) return s;  // empty sphere, radius -1
    std::vector<std::size_t> uniq;
    for (std::size_t i : support) {
        bool dup = false;
        for (std::size_t j : uniq)
            if (dist2(pts[i], pts[j]) < 1e-24) dup = true;
        if (!dup) uniq.push_back(i);
    }
    const Point& q0 = pts[uniq.front()];
    const std::size_t k = uniq.size();
    if (k == 1) {
        s.centre = q0;
        s.radius = 0.0;
        return s;
    }
    const std::size_t m = k - 1;
    std::vector<double> a(m * m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Point& qi = pts[uniq[i + 1]];
        for (std::size_t j = 0; j < m; ++j) {
            const Point& qj = pts[uniq[j + 1]];
            double dot = 0.0;
            for (std::size_t c = 0; c < q0.size(); ++c) dot += (qi[c] - q0[c]) * (qj[c] - q0[c]);
            a[i * m + j] = 2.0 * dot;
        }
        b[i] = dist2(qi, q0);
    }
    if (!solve_linear(a, b, m)) return std::nullopt;
    s.centre = q0;
    for (std::size_t i = 0; i < m; ++i) {
        const Point& qi = pts[uniq[i + 1]];
        for (std::size_t c = 0; c < q0.size(); ++c) s.centre[c] += b[i] * (qi[c] - q0[c]);
    }
    s.radius = std::sqrt(dist2(s.centre, q0));
    return s;
}

inline bool sphere_contains(const Sphere& s, const Point& p) {
    if (s.radius < 0.0) return false;
    const double r2 = s.radius * s.radius;
    return dist2(s.centre, p) <= r2 + 1e-12 * (1.0 + r2);
}

inline Sphere welzl_mtf(const std::vector<Point>& pts, std::vector<std::size_t>& order, std::size_t n,
                        std::vector<std::size_t>& support) {
    const std::size_t d = pts.front().size();
    Sphere s;
    if (auto t = sphere_through(pts, support)) s = *t;
    if (support.size() == d + 1) return s;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = order[i];
        if (sphere_contains(s, pts[p])) continue;
        support.push_back(p);
        Sphere sub = welzl_mtf(pts, order, i, support);
        support.pop_back();
        if (sub.radius >= 0.0) s = sub;
        // Move-to-front keeps hard points early and bounds the recursion.
        for (std::size_t j = i; j > 0; --j) order[j] = order[j - 1];
        order[0] = p;
    }
    return s;
}

}  // namespace detail

/// Minimal bounding sphere of a finite point set (dimension up to 10).
/// Deterministic for a fixed input order; the support field lists indices of
/// the at most d+1 points that pin the sphere.
inline Sphere min_bounding_sphere(const std::vector<Point>& pts) {
    detail::validate_points(pts, "min_bounding_sphere");
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> support;
    Sphere s = detail::welzl_mtf(pts, order, order.size(), support);
    if (s.radius < 0.0) {  // single point or total degeneracy
        s.centre = pts.front();
        s.radius = 0.0;
        s.support = {0};
    }
    return s;
}

inline Sphere min_bounding_sphere(const Polytope& p) { return min_bounding_sphere(p.vertices); }

struct JungReport {
    double radius = 0.0;
    double diameter = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// Checks the dimension-dependent radius/diameter inequality
/// r <= sqrt(n / (2(n+1))) * diam, tight on regular simplices.
inline JungReport jung_check(const std::vector<Point>& pts) {
    detail::validate_points(pts, "jung_check");
    const Sphere s = min_bounding_sphere(pts);
    JungReport rep;
    rep.radius = s.radius;
    double d2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d2 = std::max(d2, detail::dist2(pts[i], pts[j]));
    rep.diameter = std::sqrt(d2);
    const double n = static_cast<double>(pts.front().size());
    rep.bound = std::sqrt(n / (2.0 * (n + 1.0))) * rep.diameter;
    rep.ok = rep.radius <= rep.bound + 1e-9 * (1.0 + rep.bound);
    return rep;
}

struct HullProjection {
    Point point;
    double distance = 0.0;
};

namespace detail {

/// Exact projection of x onto the convex hull of a small point set by
/// enumerating candidate faces of up to dim+1 vertices. Suitable for the
/// support/contact sets used here (a handful of points).
inline HullProjection project_onto_hull(const std::vector<Point>& pts, const Point& x) {
    validate_points(pts, "project_onto_hull");
    if (pts.size() > 24) throw std::invalid_argument("project_onto_hull: point set too large");
    const std::size_t d = pts.front().size();
    if (x.size() != d) throw std::invalid_argument("project_onto_hull: dimension mismatch");

    HullProjection best;
    best.point = pts.front();
    best.distance = std::numeric_limits<double>::infinity();
    for (const Point& p : pts) {
        const double dd = std::sqrt(dist2(p, x));
        if (dd < best.distance) best = {p, dd};
    }

    const std::size_t kmax = std::min(pts.size(), d + 1);
    std::vector<std::size_t> comb;
    // Enumerate index combinations of each size 2..kmax.
    for (std::size_t k = 2; k <= kmax; ++k) {
        comb.resize(k);
        for (std::size_t i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            const Point& q0 = pts[comb[0]];
            const std::size_t m = k - 1;
            std::vector<double> g(m * m), rhs(m);
            for (std::size_t i = 0; i < m; ++i) {
                const Point& qi = pts[comb[i + 1]];
                for (std::size_t j = 0; j < m; ++j) {
                    const Point& qj = pts[comb[j + 1]];
                    double dot = 0.0;
                    for (std::size_t c = 0; c < d; ++c) dot += (qi[c] - q0[c]) * (qj[c] - q0[c]);
                    g[i * m + j] = dot;
                }
                double dot = 0.0;
                for (std::size_t c = 0; c < d; ++c) dot += (qi[c] - q0[c]) * (x[c] - q0[c]);
                rhs[i] = dot;
            }
            bool usable = solve_linear(g, rhs, m);
            if (usable) {
                double beta0 = 1.0;
                for (std::size_t i = 0; i < m; ++i) beta0 -= rhs[i];
                bool feasible = beta0 >= -1e-10;
                for (std::size_t i = 0; i < m && feasible; ++i) feasible = rhs[i] >= -1e-10;
                if (feasible) {
                    Point y = q0;
                    for (std::size_t i = 0; i < m; ++i) {
                        const Point& qi = pts[comb[i + 1]];
                        for (std::size_t c = 0; c < d; ++c) y[c] += rhs[i] * (qi[c] - q0[c]);
                    }
                    const double dd = std::sqrt(dist2(y, x));
                    if (dd < best.distance) best = {y, dd};
                }
            }
            // next combination
            std::size_t i = k;
            while (i-- > 0) {
                if (comb[i] + (k - i) < pts.size()) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    i = std::numeric_limits<std::size_t>::max();
                    break;
                }
            }
            if (i == std::numeric_limits<std::size_t>::max()) break;
        }
    }
    return best;
}

}  // namespace detail

struct CentreHullReport {
    bool ok = false;
    double residual = 0.0;
    std::vector<std::size_t> contacts;
};

/// For a minimal sphere, the centre must lie in the convex hull of the
/// contact points (those on the boundary within contact_tol). Recomputes the
/// sphere to reject a non-minimal input, then solves the small projection
/// problem; ok iff the residual is at most residual_tol.
inline CentreHullReport centre_in_hull_check(const std::vector<Point>& pts, const Sphere& s,
                                             double contact_tol = 1e-7, double residual_tol = 1e-7) {
    detail::validate_points(pts, "centre_in_hull_check");
    const Sphere ref = min_bounding_sphere(pts);
    const double scale = 1.0 + ref.radius;
    if (std::abs(ref.radius - s.radius) > 1e-7 * scale || std::sqrt(detail::dist2(ref.centre, s.centre)) > 1e-7 * scale)
        throw std::invalid_argument("centre_in_hull_check: sphere is not the minimal bounding sphere of the points");

    CentreHullReport rep;
    std::vector<Point> contact_pts;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dist = std::sqrt(detail::dist2(pts[i], s.centre));
        if (std::abs(dist - s.radius) <= contact_tol * scale) {
            rep.contacts.push_back(i);
            contact_pts.push_back(pts[i]);
        }
    }
    if (contact_pts.empty()) return rep;  // cannot certify; ok stays false
    rep.residual = detail::project_onto_hull(contact_pts, s.centre).distance;
    rep.ok = rep.residual <= residual_tol;
    return rep;
}

}  // namespace ccx
