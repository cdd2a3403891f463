// Acceptance gate: ten end-to-end checks, one verdict line each.
// Every tolerance is pinned here; a FAIL on any line fails the binary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <ccx/ccx.hpp>

namespace {

using namespace ccx;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ScalarGrid sample_1d(double lo, double hi, double h, const std::function<double(double)>& f) {
    const std::size_t n = static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;
    GridSpec spec{{n}, {lo}, {h}};
    return sample_grid(spec, [&](const std::vector<double>& x) { return f(x[0]); });
}

std::size_t nearest_node(const ScalarGrid& g, double x) {
    return static_cast<std::size_t>(std::llround((x - g.origin[0]) / g.spacing[0]));
}

// 1. Upper transform of |x| at lambda=10, h=1e-3 against the closed form:
//    the kink is replaced by a parabola cap of height 1/(4 lambda).
bool kink_closed_form(std::string& detail) {
    const double lambda = 10.0, h = 1e-3;
    const double cap = 1.0 / (2.0 * lambda);
    const double tol_shape = 5e-3, tol_valley = 5e-4, tol_scale1 = 1e-2;

    ScalarGrid f = sample_1d(-1.0, 1.0, h, [](double x) { return std::abs(x); });
    ScalarGrid fu = upper_transform(f, lambda);
    auto closed = [&](double x) {
        return std::abs(x) >= cap ? std::abs(x) : lambda * x * x + 1.0 / (4.0 * lambda);
    };
    double gap = 0.0;
    for (std::size_t i = 0; i < fu.values.size(); ++i) {
        const double x = f.origin[0] + static_cast<double>(i) * h;
        if (std::abs(x) > 0.9) continue;
        gap = std::max(gap, std::abs(fu.values[i] - closed(x)));
    }
    const std::size_t mid = nearest_node(f, 0.0);
    const double valley = fu.values[mid] - f.values[mid];
    const double scale1 = scale1_map(f, lambda, SingularityKind::valley).values[mid];

    const bool ok = gap <= tol_shape && std::abs(valley - 0.025) <= tol_valley &&
                    std::abs(scale1 - 0.25) <= tol_scale1;
    std::ostringstream os;
    os << "max closed-form gap " << fmt(gap) << " (tol " << fmt(tol_shape) << "), valley(0) "
       << fmt(valley) << " vs 0.025, scale-1 " << fmt(scale1) << " vs 0.25";
    detail = os.str();
    return ok;
}

// 2. Scale-1 valley sweeps of three oracles converge to the predicted
//    quarter-square of the subdifferential minisphere radius within 2%.
bool oracle_landscape_limits(std::string& detail) {
    const double rtol = 0.02;
    const std::vector<double> lambdas = geometric_lambdas(4.0, 2.0, 256.0);
    struct Case {
        const char* name;
        TestFunctionRef f;
        Point probe;
    };
    const std::vector<Case> cases = {
        {"abs", make_abs(), {0.0}},
        {"relu", make_relu(), {0.0}},
        {"square-gauge", make_sublinear({{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}}), {0.0, 0.0}},
    };
    bool ok = true;
    std::ostringstream os;
    for (const Case& c : cases) {
        const LandscapePrediction pred = predicted_landscape(*c.f, c.probe);
        const SweepReport rep = landscape_sweep(*c.f, c.probe, lambdas, SingularityKind::valley);
        const bool good = rep.converged && std::abs(rep.limit_estimate - pred.limit) <= rtol * pred.limit;
        ok = ok && good;
        os << c.name << " " << fmt(rep.limit_estimate) << " vs " << fmt(pred.limit) << "; ";
    }
    os << "rtol " << fmt(rtol);
    detail = os.str();
    return ok;
}

// 3. Upper-transform gradients at the kink: relu tends to the midpoint slope
//    1/2, abs to 0 (both are the minisphere centres of the subdifferential).
bool transform_gradient_probes(std::string& detail) {
    const double lambda = 128.0, tol = 0.02;
    const std::vector<double> g_relu = gradient_at_probe(*make_relu(), {0.0}, lambda, TransformKind::upper);
    const std::vector<double> g_abs = gradient_at_probe(*make_abs(), {0.0}, lambda, TransformKind::upper);
    const bool ok = std::abs(g_relu[0] - 0.5) <= tol && std::abs(g_abs[0]) <= tol;
    detail = "relu slope " + fmt(g_relu[0]) + " vs 0.5, abs slope " + fmt(g_abs[0]) + " vs 0 (tol " + fmt(tol) + ")";
    return ok;
}

// 4. Scale-1 edge of |x| - |y| at the origin and lambda=64 on a fixed
//    dyadic spacing: ridge and valley each contribute 1/4.
bool mixed_kink_edge_value(std::string& detail) {
    const double lambda = 64.0, rtol = 0.05;
    const TestFunctionRef f = make_dc(make_sublinear({{1.0, 0.0}, {-1.0, 0.0}}),
                                      make_sublinear({{0.0, 1.0}, {0.0, -1.0}}));
    SweepOptions opt;
    opt.fixed_spacing = 1.0 / 1024.0;
    const SweepReport rep = landscape_sweep(*f, {0.0, 0.0}, {lambda}, SingularityKind::edge, opt);
    const double v = rep.values.front();
    const bool ok = std::abs(v - 0.5) <= rtol * 0.5 && rep.warnings.empty();
    detail = "edge value " + fmt(v) + " vs 0.5 (rtol " + fmt(rtol) + ")";
    return ok;
}

TestFunctionRef random_sublinear(std::mt19937_64& rng, int dim, double span) {
    std::uniform_int_distribution<int> kd(2, 4);
    std::uniform_real_distribution<double> sd(-span, span);
    std::vector<Point> vs;
    const int k = kd(rng);
    for (int i = 0; i < k; ++i) {
        Point p(static_cast<std::size_t>(dim));
        for (double& c : p) c = sd(rng);
        vs.push_back(std::move(p));
    }
    return make_sublinear(std::move(vs));
}

// 5. Edge lower bound for differences of convex gauges: three worked pairs
//    with known limits plus twenty random pairs, all satisfying
//    liminf >= (r_g - r_h)^2 / 4 - tol.
bool dc_edge_lower_bound(std::string& detail) {
    const double tol = 0.01;
    const std::vector<double> lambdas = geometric_lambdas(4.0, 2.0, 64.0);
    bool ok = true;
    std::ostringstream os;

    // Same gauge twice: the difference vanishes identically, bound 0.
    {
        const DcEdgeReport r = dc_edge_bound(make_abs(), make_abs(), {0.0}, lambdas, tol);
        const bool good = r.ok && r.bound == 0.0 && std::abs(r.liminf_estimate) <= 1e-9;
        ok = ok && good;
        os << "same-gauge " << fmt(r.liminf_estimate) << ">=0; ";
    }
    // Equal radii but different axes: bound 0 while the edge limit is 1/2,
    // so the inequality is strict.
    {
        const DcEdgeReport r = dc_edge_bound(make_sublinear({{1.0, 0.0}, {-1.0, 0.0}}),
                                             make_sublinear({{0.0, 1.0}, {0.0, -1.0}}),
                                             {0.0, 0.0}, lambdas, tol);
        const bool good = r.ok && r.bound <= 1e-12 && std::abs(r.liminf_estimate - 0.5) <= 1e-3;
        ok = ok && good;
        os << "cross-axes " << fmt(r.liminf_estimate) << " vs bound 0; ";
    }
    // Nested gauges 2|x| and |x|: the bound (2-1)^2/4 is attained.
    {
        const DcEdgeReport r = dc_edge_bound(make_sublinear({{2.0}, {-2.0}}), make_abs(), {0.0}, lambdas, tol);
        const bool good = r.ok && std::abs(r.bound - 0.25) <= 1e-12 && std::abs(r.liminf_estimate - 0.25) <= 5e-3;
        ok = ok && good;
        os << "nested " << fmt(r.liminf_estimate) << " vs bound " << fmt(r.bound) << "; ";
    }

    std::mt19937_64 rng(20260818u);
    int passed = 0;
    for (int i = 0; i < 10; ++i) {
        const DcEdgeReport r = dc_edge_bound(random_sublinear(rng, 1, 2.0), random_sublinear(rng, 1, 2.0),
                                             {0.0}, lambdas, tol);
        passed += r.ok ? 1 : 0;
        ok = ok && r.ok;
    }
    SweepOptions fine;
    fine.lambda_h = 1.0 / 24.0;
    for (int i = 0; i < 10; ++i) {
        const DcEdgeReport r = dc_edge_bound(random_sublinear(rng, 2, 1.0), random_sublinear(rng, 2, 1.0),
                                             {0.0, 0.0}, lambdas, tol, fine);
        passed += r.ok ? 1 : 0;
        ok = ok && r.ok;
    }
    os << "random pairs " << passed << "/20 (tol " << fmt(tol) << ")";
    detail = os.str();
    return ok;
}

// 6. Medial landscape of two sites: the scaled ridge of the squared distance
//    equals the squared-distance shortfall (here 1) at the midpoint normal,
//    and the distance/squared-distance landscapes agree through the quotient.
bool medial_landscape(std::string& detail) {
    const std::vector<Point> sites = {{-1.0, 0.0}, {1.0, 0.0}};
    const Point probe = {0.0, 0.0};
    const double rtol_value = 0.02;

    const MedialLimit formula = medial_limit_formula(sites, probe);
    bool ok = std::abs(formula.limit - 1.0) <= 1e-12;

    const TestFunctionRef d2 = make_sq_dist(sites);
    double v64 = 0.0;
    for (double lambda : {16.0, 32.0, 64.0}) {
        const double h = (1.0 / 12.0) / lambda;
        const GridSpec spec = ccx::detail::probe_window(*d2, probe, lambda, h, 1.25);
        const ScalarGrid m = medial_axis_map(SiteSet{sites}, lambda, spec);
        std::vector<std::size_t> centre(spec.dims.size());
        for (std::size_t a = 0; a < spec.dims.size(); ++a) centre[a] = spec.dims[a] / 2;
        v64 = m.values[flatten(centre, strides_of(m.dims))];
    }
    ok = ok && std::abs(v64 - formula.limit) <= rtol_value * formula.limit;

    const MedialQuotientReport rep =
        distance_vs_sqdistance_check(SiteSet{sites}, probe, geometric_lambdas(16.0, 2.0, 256.0));
    ok = ok && rep.quotient_ok;

    std::ostringstream os;
    os << "scaled ridge " << fmt(v64) << " vs " << fmt(formula.limit) << " (rtol " << fmt(rtol_value)
       << "); quotient " << fmt(rep.quotient_lhs) << " vs " << fmt(rep.quotient_rhs)
       << (rep.quotient_ok ? " ok" : " MISMATCH");
    detail = os.str();
    return ok;
}

// Reference smallest enclosing sphere: enumerate boundary subsets of size
// up to d+1, solve the circumsphere system, keep the smallest enclosing one.
Sphere brute_min_sphere(const std::vector<Point>& pts) {
    const std::size_t d = pts.front().size();
    Sphere best;
    best.radius = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    const std::size_t kmax = std::min(n, d + 1);
    std::vector<std::size_t> comb;
    auto try_subset = [&](const std::vector<std::size_t>& s) {
        const Point& q0 = pts[s[0]];
        const std::size_t m = s.size() - 1;
        Point c = q0;
        if (m > 0) {
            std::vector<double> g(m * m), rhs(m);
            double scale = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const Point& qi = pts[s[i + 1]];
                double nn = 0.0;
                for (std::size_t a = 0; a < d; ++a) nn += (qi[a] - q0[a]) * (qi[a] - q0[a]);
                rhs[i] = nn;
                for (std::size_t j = 0; j < m; ++j) {
                    const Point& qj = pts[s[j + 1]];
                    double dot = 0.0;
                    for (std::size_t a = 0; a < d; ++a) dot += (qi[a] - q0[a]) * (qj[a] - q0[a]);
                    g[i * m + j] = 2.0 * dot;
                    scale = std::max(scale, std::abs(g[i * m + j]));
                }
            }
            // Gaussian elimination with partial pivoting; singular subsets skipped.
            std::vector<std::size_t> perm(m);
            for (std::size_t i = 0; i < m; ++i) perm[i] = i;
            for (std::size_t col = 0; col < m; ++col) {
                std::size_t piv = col;
                for (std::size_t r = col + 1; r < m; ++r)
                    if (std::abs(g[r * m + col]) > std::abs(g[piv * m + col])) piv = r;
                if (std::abs(g[piv * m + col]) <= 1e-12 * (1.0 + scale)) return;
                if (piv != col) {
                    for (std::size_t cc = 0; cc < m; ++cc) std::swap(g[piv * m + cc], g[col * m + cc]);
                    std::swap(rhs[piv], rhs[col]);
                }
                for (std::size_t r = col + 1; r < m; ++r) {
                    const double fac = g[r * m + col] / g[col * m + col];
                    for (std::size_t cc = col; cc < m; ++cc) g[r * m + cc] -= fac * g[col * m + cc];
                    rhs[r] -= fac * rhs[col];
                }
            }
            std::vector<double> t(m);
            for (std::size_t r = m; r-- > 0;) {
                double v = rhs[r];
                for (std::size_t cc = r + 1; cc < m; ++cc) v -= g[r * m + cc] * t[cc];
                t[r] = v / g[r * m + r];
            }
            for (std::size_t i = 0; i < m; ++i) {
                const Point& qi = pts[s[i + 1]];
                for (std::size_t a = 0; a < d; ++a) c[a] += t[i] * (qi[a] - q0[a]);
            }
        }
        double r2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) r2 += (c[a] - q0[a]) * (c[a] - q0[a]);
        const double r = std::sqrt(r2);
        if (r >= best.radius) return;
        for (const Point& p : pts) {
            double dd = 0.0;
            for (std::size_t a = 0; a < d; ++a) dd += (p[a] - c[a]) * (p[a] - c[a]);
            if (std::sqrt(dd) > r + 1e-10 * (1.0 + r)) return;
        }
        best.centre = c;
        best.radius = r;
    };
    for (std::size_t k = 1; k <= kmax; ++k) {
        comb.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            try_subset(comb);
            std::size_t i = k;
            bool advanced = false;
            while (i-- > 0) {
                if (comb[i] + (k - i) < n) {
                    ++comb[i];
                    for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
    }
    return best;
}

// 7. Smallest enclosing spheres on 200 random point sets against subset
//    enumeration, plus the radius/diameter inequality (tight on the
//    equilateral triangle) and the centre-in-hull certificate.
bool bounding_spheres(std::string& detail) {
    const double tol = 1e-9;
    std::mt19937_64 rng(77001u);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    double worst = 0.0;
    int bad = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = (t % 2 == 0) ? 2 : 3;
        std::uniform_int_distribution<std::size_t> nd(1, 8);
        const std::size_t n = nd(rng);
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
            Point p(d);
            for (double& c : p) c = coord(rng);
            pts.push_back(std::move(p));
        }
        const Sphere s = min_bounding_sphere(pts);
        const Sphere ref = brute_min_sphere(pts);
        worst = std::max(worst, std::abs(s.radius - ref.radius));
        bool good = std::abs(s.radius - ref.radius) <= tol * (1.0 + ref.radius);
        for (const Point& p : pts) {
            double dd = 0.0;
            for (std::size_t a = 0; a < d; ++a) dd += (p[a] - s.centre[a]) * (p[a] - s.centre[a]);
            good = good && std::sqrt(dd) <= s.radius + tol * (1.0 + s.radius);
        }
        good = good && jung_check(pts).ok;
        good = good && centre_in_hull_check(pts, s).ok;
        bad += good ? 0 : 1;
    }
    const std::vector<Point> tri = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
    const JungReport jr = jung_check(tri);
    const bool tight = std::abs(jr.radius - jr.bound) <= 1e-9;
    const bool ok = bad == 0 && tight;
    std::ostringstream os;
    os << "200 sets, " << bad << " mismatches, worst radius gap " << fmt(worst)
       << " (tol " << fmt(tol) << "), equilateral slack " << fmt(jr.bound - jr.radius);
    detail = os.str();
    return ok;
}

ScalarGrid random_walk_1d(std::mt19937_64& rng, std::size_t n, double h, double lip) {
    GridSpec spec{{n}, {-0.5 * h * static_cast<double>(n - 1)}, {h}};
    ScalarGrid g = make_grid(spec);
    std::uniform_real_distribution<double> step(-lip * h, lip * h);
    std::uniform_real_distribution<double> start(-1.0, 1.0);
    g.values[0] = start(rng);
    for (std::size_t i = 1; i < n; ++i) g.values[i] = g.values[i - 1] + step(rng);
    return g;
}

ScalarGrid random_walk_2d(std::mt19937_64& rng, std::size_t n0, std::size_t n1, double h, double lip) {
    GridSpec spec{{n0, n1}, {0.0, 0.0}, {h, h}};
    ScalarGrid g = make_grid(spec);
    std::uniform_real_distribution<double> step(-lip * h, lip * h);
    std::uniform_real_distribution<double> noise(-0.4 * lip * h, 0.4 * lip * h);
    std::vector<double> w0(n0, 0.0), w1(n1, 0.0);
    for (std::size_t i = 1; i < n0; ++i) w0[i] = w0[i - 1] + step(rng);
    for (std::size_t j = 1; j < n1; ++j) w1[j] = w1[j - 1] + step(rng);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) g.values[i * n1 + j] = w0[i] + w1[j] + noise(rng);
    return g;
}

// 8. Structural identities on 100 random Lipschitz grids: ordering, exact
//    duality, the quarter-square sandwich, edge splitting, idempotence,
//    affine covariance, two-scale subadditivity, translation invariance.
bool transform_properties(std::string& detail) {
    int failures = 0;
    std::ostringstream first;
    auto fail = [&](int grid, const char* what) {
        if (failures == 0) first << " (first: grid " << grid << " " << what << ")";
        ++failures;
    };
    std::mt19937_64 rng(40100u);
    for (int t = 0; t < 100; ++t) {
        const bool two_d = t % 10 == 9;
        const double h = two_d ? 0.05 : std::vector<double>{0.02, 0.05, 0.08}[t % 3];
        const double lambda = two_d ? std::vector<double>{3.0, 12.0}[t % 2]
                                    : std::vector<double>{0.75, 3.0, 12.0}[t % 3];
        const double tau = 2.0 * lambda;
        ScalarGrid f = two_d ? random_walk_2d(rng, 13, 11, h, 2.0)
                             : random_walk_1d(rng, 61 + 8 * (t % 5), h, 2.0);
        const double root_d = std::sqrt(static_cast<double>(f.dims.size()));
        const double lip = estimate_lipschitz(f) * root_d;

        const ScalarGrid fl = lower_transform(f, lambda);
        const ScalarGrid fu = upper_transform(f, lambda);

        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (fl.values[i] > f.values[i] + 1e-9 || f.values[i] > fu.values[i] + 1e-9) {
                fail(t, "ordering");
                break;
            }
        }

        const ScalarGrid neg = map_values(f, [](double v) { return -v; });
        const ScalarGrid dual = lower_transform(neg, lambda);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (fu.values[i] != -dual.values[i]) {
                fail(t, "duality");
                break;
            }
        }

        const double sandwich = lip * lip / (4.0 * lambda) + transform_tolerance(lambda, h, lip);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            const double below = f.values[i] - fl.values[i];
            const double above = fu.values[i] - f.values[i];
            if (below < -1e-9 || below > sandwich || above < -1e-9 || above > sandwich) {
                fail(t, "sandwich");
                break;
            }
        }

        const ScalarGrid edge = singular_map(f, lambda, SingularityKind::edge);
        const ScalarGrid ridge = singular_map(f, lambda, SingularityKind::ridge);
        const ScalarGrid valley = singular_map(f, lambda, SingularityKind::valley);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (edge.values[i] != ridge.values[i] + valley.values[i]) {
                fail(t, "edge-split");
                break;
            }
        }

        const ScalarGrid padded = pad_for_locality(f, estimate_lipschitz(f), lambda);
        const ScalarGrid once = lower_transform(padded, lambda);
        const ScalarGrid twice = lower_transform(once, lambda);
        for (std::size_t i = 0; i < once.values.size(); ++i) {
            if (std::abs(twice.values[i] - once.values[i]) > 1e-9) {
                fail(t, "idempotence");
                break;
            }
        }

        const std::vector<double> slope(f.dims.size(), 0.7);
        ScalarGrid affine = make_grid(GridSpec{f.dims, f.origin, f.spacing});
        {
            std::vector<std::size_t> idx(f.dims.size(), 0);
            for (std::size_t i = 0; i < affine.values.size(); ++i) {
                double v = -0.3;
                for (std::size_t a = 0; a < f.dims.size(); ++a)
                    v += slope[a] * (f.origin[a] + static_cast<double>(idx[a]) * f.spacing[a]);
                affine.values[i] = v;
                for (std::size_t a = f.dims.size(); a-- > 0;) {
                    if (++idx[a] < f.dims[a]) break;
                    idx[a] = 0;
                }
            }
        }
        const ScalarGrid shifted = zip_values(f, affine, [](double a, double b) { return a + b; });
        const ScalarGrid tsh = upper_transform(shifted, lambda);
        const double tol_affine = transform_tolerance(lambda, h, lip) +
                                  transform_tolerance(lambda, h, estimate_lipschitz(shifted) * root_d);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (std::abs(tsh.values[i] - (fu.values[i] + affine.values[i])) > tol_affine) {
                fail(t, "affine");
                break;
            }
        }

        ScalarGrid g2 = two_d ? random_walk_2d(rng, 13, 11, h, 2.0)
                              : random_walk_1d(rng, f.dims[0], h, 2.0);
        g2.origin = f.origin;
        const ScalarGrid sum = zip_values(f, g2, [](double a, double b) { return a + b; });
        const ScalarGrid tsum = upper_transform(sum, lambda + tau);
        const ScalarGrid tg2 = upper_transform(g2, tau);
        const double lip2 = estimate_lipschitz(g2) * root_d;
        const double tol_sub = transform_tolerance(lambda + tau, h, estimate_lipschitz(sum) * root_d) +
                               transform_tolerance(lambda, h, lip) + transform_tolerance(tau, h, lip2);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (tsum.values[i] > fu.values[i] + tg2.values[i] + tol_sub) {
                fail(t, "subadditivity");
                break;
            }
        }

        ScalarGrid moved = f;
        for (double& o : moved.origin) o += 1.37;
        const ScalarGrid tmoved = upper_transform(moved, lambda);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            if (tmoved.values[i] != fu.values[i]) {
                fail(t, "translation");
                break;
            }
        }
    }
    detail = "100 grids, " + std::to_string(failures) + " property failures" + first.str();
    return failures == 0;
}

// 9. Tight attachment on a smooth function: for some lambda <= 64 both
//    transforms of x^2 reproduce it to 1e-6 away from the boundary.
bool smooth_tight_attachment(std::string& detail) {
    const double h = 5e-4, tol = 1e-6;
    ScalarGrid f = sample_1d(-1.0, 1.0, h, [](double x) { return x * x; });
    const std::size_t lo = nearest_node(f, -0.5), hi = nearest_node(f, 0.5);
    double best = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (double lambda : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        const ScalarGrid fu = upper_transform(f, lambda);
        const ScalarGrid fl = lower_transform(f, lambda);
        double gap = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            gap = std::max(gap, std::abs(fu.values[i] - f.values[i]));
            gap = std::max(gap, std::abs(fl.values[i] - f.values[i]));
        }
        if (gap < best) {
            best = gap;
            best_lambda = lambda;
        }
        if (best <= tol) break;
    }
    detail = "max two-sided gap " + fmt(best) + " at lambda " + fmt(best_lambda) + " (tol " + fmt(tol) + ")";
    return best <= tol;
}

// 10. Gradients of the upper transform vary at most 2*lambda per unit step,
//     and the parabola cap of |x| attains that rate.
bool gradient_lipschitz(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    for (double lambda : {10.0, 100.0}) {
        const double h = 1.0 / (12.0 * lambda);
        ScalarGrid f = sample_1d(-2.0, 2.0, h, [](double x) { return std::abs(x); });
        const GradientLipschitzReport rep = gradient_lipschitz_check(f, lambda);
        const bool good = rep.ok && rep.max_ratio >= 0.99 * rep.bound;
        ok = ok && good;
        os << "lambda " << fmt(lambda) << ": ratio " << fmt(rep.max_ratio) << " vs bound " << fmt(rep.bound) << "; ";
    }
    os << "slack 1.05";
    detail = os.str();
    return ok;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*run)(std::string&);
    };
    const std::vector<Criterion> criteria = {
        {"kink transform closed form", kink_closed_form},
        {"oracle landscape limits", oracle_landscape_limits},
        {"transform gradient probes", transform_gradient_probes},
        {"cross-kink edge value", mixed_kink_edge_value},
        {"dc edge lower bound", dc_edge_lower_bound},
        {"medial landscape", medial_landscape},
        {"bounding spheres", bounding_spheres},
        {"transform properties", transform_properties},
        {"smooth tight attachment", smooth_tight_attachment},
        {"gradient lipschitz rate", gradient_lipschitz},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failures += ok ? 0 : 1;
        std::printf("[%2zu] %s  %s: %s\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].name, detail.c_str());
    }
    if (failures != 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
