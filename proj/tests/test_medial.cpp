#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <ccx/medial.hpp>

using namespace ccx;

namespace {

double direct_sq_dist(const SiteSet& sites, const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : sites.points) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - p[a]) * (x[a] - p[a]);
        best = std::min(best, d2);
    }
    return best;
}

}  // namespace

TEST_CASE("squared distance transform matches the direct minimum") {
    SECTION("single site on a node, dyadic spacing, exact values") {
        const SiteSet sites{{{0.0}}};
        const ScalarGrid g = sq_distance_transform(sites, GridSpec{{5}, {-1.0}, {0.5}});
        REQUIRE(g.values == std::vector<double>{1.0, 0.25, 0.0, 0.25, 1.0});
    }
    SECTION("several sites on nodes, anisotropic spacing") {
        const GridSpec spec{{21, 17}, {-1.0, 0.5}, {0.25, 0.125}};
        const SiteSet sites{{{-1.0, 0.5}, {0.5, 1.625}, {4.0, 2.5}, {1.25, 0.875}}};
        const ScalarGrid g = sq_distance_transform(sites, spec);
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const Point x = node_coord(g, unflatten(i, g.dims));
            REQUIRE_THAT(g.values[i], Catch::Matchers::WithinAbs(direct_sq_dist(sites, x), 1e-10));
        }
    }
    SECTION("off-node sites take the direct path and agree with the sweep") {
        const GridSpec spec{{9, 9}, {0.0, 0.0}, {0.25, 0.25}};
        SiteSet on{{{0.25, 0.5}, {1.0, 0.75}}};
        SiteSet off = on;
        off.points[0][0] += 1e-7;  // beyond the node-snap tolerance
        const ScalarGrid a = sq_distance_transform(on, spec);
        const ScalarGrid b = sq_distance_transform(off, spec);
        for (std::size_t i = 0; i < a.values.size(); ++i)
            REQUIRE_THAT(a.values[i], Catch::Matchers::WithinAbs(b.values[i], 1e-5));
    }
    SECTION("input validation") {
        REQUIRE_THROWS_AS(sq_distance_transform(SiteSet{}, GridSpec{{5}, {0.0}, {1.0}}), std::invalid_argument);
        REQUIRE_THROWS_AS(sq_distance_transform(SiteSet{{{0.0, 0.0}}}, GridSpec{{5}, {0.0}, {1.0}}),
                          std::invalid_argument);
        const double inf = std::numeric_limits<double>::infinity();
        REQUIRE_THROWS_AS(sq_distance_transform(SiteSet{{{inf}}}, GridSpec{{5}, {0.0}, {1.0}}),
                          std::invalid_argument);
    }
}

TEST_CASE("masks turn nonzero cells into site coordinates") {
    ScalarGrid mask = make_grid(GridSpec{{3, 3}, {1.0, 2.0}, {0.5, 0.5}});
    mask.values[1 * 3 + 2] = 1.0;
    mask.values[2 * 3 + 0] = -4.0;  // any nonzero marks a site
    const SiteSet sites = sites_from_mask(mask);
    REQUIRE(sites.points.size() == 2);
    REQUIRE(sites.points[0] == Point{1.5, 3.0});
    REQUIRE(sites.points[1] == Point{2.0, 2.0});
    REQUIRE_THROWS_AS(sites_from_mask(make_grid(GridSpec{{3}, {0.0}, {1.0}})), std::invalid_argument);
}

TEST_CASE("medial landscape of a two-site set") {
    // K = {(-1,0), (1,0)}: at (0,1) the nearest-site squared distance is 2 and
    // the squared distance to the segment between the sites is 1, so the
    // medial value is 1; near a site the map vanishes.
    const SiteSet sites{{{-1.0, 0.0}, {1.0, 0.0}}};
    const GridSpec spec{{401, 401}, {-2.0, -2.0}, {0.01, 0.01}};
    const double lambda = 8.0;
    const ScalarGrid m = medial_axis_map(sites, lambda, spec);

    const auto strides = strides_of(m.dims);
    const double at_probe = m.values[flatten({200, 300}, strides)];
    const double at_site = m.values[flatten({100, 200}, strides)];
    REQUIRE_THAT(at_probe, Catch::Matchers::WithinAbs(1.0, 0.05));
    REQUIRE(at_site <= 0.02);
    REQUIRE(*std::min_element(m.values.begin(), m.values.end()) >= 0.0);

    const MedialLimit ml = medial_limit_formula(sites.points, {0.0, 1.0});
    REQUIRE_THAT(ml.limit, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(at_probe, Catch::Matchers::WithinAbs(ml.limit, 0.05));
}

TEST_CASE("distance and squared-distance landscapes agree through the quotient") {
    SECTION("two sites on a line, probe between them") {
        const SiteSet sites{{{-1.0}, {1.0}}};
        const MedialQuotientReport rep =
            distance_vs_sqdistance_check(sites, {0.0}, geometric_lambdas(16.0, 2.0, 128.0));
        REQUIRE(rep.ok);
        REQUIRE(rep.quotient_ok);
        REQUIRE(rep.gradient_ok);
        REQUIRE_THAT(rep.sq_dist, Catch::Matchers::WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(rep.quotient_lhs, Catch::Matchers::WithinAbs(0.25, 1e-6));
        REQUIRE_THAT(rep.quotient_rhs, Catch::Matchers::WithinAbs(0.25, 0.01));
        REQUIRE_THAT(rep.grad_dist[0], Catch::Matchers::WithinAbs(0.0, 1e-6));
    }
    SECTION("two sites in the plane, probe on the bisector") {
        const SiteSet sites{{{-1.0, 0.0}, {1.0, 0.0}}};
        const MedialQuotientReport rep =
            distance_vs_sqdistance_check(sites, {0.0, 1.0}, geometric_lambdas(16.0, 2.0, 64.0));
        REQUIRE(rep.ok);
        REQUIRE_THAT(rep.sq_dist, Catch::Matchers::WithinAbs(2.0, 1e-12));
        // limit of the distance ridge is r^2/4 for the gradient half-gap r
        REQUIRE_THAT(rep.quotient_lhs, Catch::Matchers::WithinAbs(0.125, 0.005));
        // lower-transform gradient tracks the mean of the two unit directions
        REQUIRE_THAT(rep.grad_dist[0], Catch::Matchers::WithinAbs(0.0, 1e-6));
        REQUIRE_THAT(rep.grad_dist[1], Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 0.01));
        REQUIRE_THAT(rep.grad_sqdist_scaled[1], Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 0.01));
    }
    SECTION("probes on a site are rejected") {
        const SiteSet sites{{{-1.0, 0.0}, {1.0, 0.0}}};
        REQUIRE_THROWS_AS(distance_vs_sqdistance_check(sites, {-1.0, 0.0}, {16.0}), std::invalid_argument);
    }
}
