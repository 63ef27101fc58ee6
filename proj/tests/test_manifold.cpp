#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "geoconvex/manifold.hpp"

using namespace geoconvex;

TEST_CASE("angle helpers") {
    CHECK(normalize_angle(0.0) == 0.0);
    CHECK(normalize_angle(kTwoPi) == 0.0);
    CHECK(normalize_angle(-0.1) == doctest::Approx(kTwoPi - 0.1));
    CHECK(normalize_angle(7.0) == doctest::Approx(7.0 - kTwoPi));

    CHECK(signed_angle_delta(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(signed_angle_delta(0.1, kTwoPi - 0.1) == doctest::Approx(-0.2));
    // antipodal tie resolves counterclockwise
    CHECK(signed_angle_delta(0.0, kPi) == doctest::Approx(kPi));
    CHECK(signed_angle_delta(kPi, 0.0) == doctest::Approx(kPi));
}

TEST_CASE("manifold specs and points") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    CHECK(cyl.is_cylinder());
    CHECK(cyl.dim() == 2);
    auto names = cyl.coordinate_names();
    CHECK(names == std::vector<std::string>{"h1", "th1"});

    Point p = cyl.make_point({1.5, -0.5});
    CHECK(p.coords[0] == 1.5);
    CHECK(p.coords[1] == doctest::Approx(kTwoPi - 0.5));  // normalized

    ManifoldSpec seg({Factor::line(0.0, 1.0)});
    CHECK_THROWS_AS(seg.make_point({2.0}), std::invalid_argument);
    CHECK_THROWS_AS(ManifoldSpec({}), std::invalid_argument);
    CHECK_THROWS_AS(Factor::line(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("geodesics interpolate factor-wise") {
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    Geodesic g = geodesic_between(line, Point{{0.0}}, Point{{2.0}});
    CHECK(g.at(0.25).coords[0] == 0.5);

    // the helix of the cylinder example
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Geodesic helix = geodesic_between(cyl, cyl.make_point({0.0, 0.0}),
                                      cyl.make_point({1.0, kPi / 2}));
    Point mid = helix.at(0.5);
    CHECK(mid.coords[0] == doctest::Approx(0.5));
    CHECK(mid.coords[1] == doctest::Approx(kPi / 4));

    // shorter arc through 0
    ManifoldSpec circ({Factor::circle()});
    Geodesic arc = geodesic_between(circ, circ.make_point({0.1}),
                                    circ.make_point({kTwoPi - 0.1}));
    CHECK(arc.at(0.5).coords[0] == doctest::Approx(0.0).epsilon(1e-12));

    // antipodal tie goes counterclockwise
    Geodesic tie = geodesic_between(circ, circ.make_point({0.0}), circ.make_point({kPi}));
    CHECK(tie.at(0.5).coords[0] == doctest::Approx(kPi / 2));

    CHECK_THROWS_AS(helix.at(1.5), std::out_of_range);
    CHECK_THROWS_AS(helix.at(-0.1), std::out_of_range);
    CHECK_THROWS_AS(helix.velocity(1.5), std::out_of_range);
    CHECK_THROWS_AS(helix.velocity(-0.1), std::out_of_range);
}

TEST_CASE("endpoint exactness and constant speed") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> h(-3.0, 3.0), th(0.0, kTwoPi);
    for (int trial = 0; trial < 100; ++trial) {
        Point x = cyl.make_point({h(rng), th(rng)});
        Point y = cyl.make_point({h(rng), th(rng)});
        Geodesic g = geodesic_between(cyl, x, y);
        CHECK(g.at(0.0).coords == x.coords);  // bitwise
        CHECK(g.at(1.0).coords == y.coords);
        auto v0 = g.velocity(0.0);
        for (double t : {0.25, 0.5, 0.75, 1.0}) CHECK(g.velocity(t) == v0);
    }
}

TEST_CASE("geodesic velocity components") {
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    CHECK(geodesic_between(line, Point{{0.0}}, Point{{2.0}}).velocity(0.3)[0] == 2.0);

    // oracle: differentiate the helix formula by hand
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Geodesic helix = geodesic_between(cyl, cyl.make_point({0.0, 0.0}),
                                      cyl.make_point({1.0, kPi / 2}));
    CHECK(helix.velocity(0.0)[0] == doctest::Approx(1.0));
    CHECK(helix.velocity(0.0)[1] == doctest::Approx(kPi / 2));

    // reversal negates the velocity (non-antipodal displacements)
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> h(-3.0, 3.0), th(0.0, kTwoPi);
    for (int trial = 0; trial < 100; ++trial) {
        Point x = cyl.make_point({h(rng), th(rng)});
        Point y = cyl.make_point({h(rng), th(rng)});
        Geodesic fwd = geodesic_between(cyl, x, y);
        if (std::abs(std::abs(fwd.delta()[1]) - kPi) < 1e-9) continue;
        Geodesic rev = geodesic_between(cyl, y, x);
        for (std::size_t d = 0; d < 2; ++d)
            CHECK(rev.velocity(0.0)[d] == doctest::Approx(-fwd.velocity(0.0)[d]).epsilon(1e-12));
    }
}

TEST_CASE("reversal and segment restriction properties") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> h(-3.0, 3.0), th(0.0, kTwoPi), par(0.0, 1.0);
    int restriction_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Point x = cyl.make_point({h(rng), th(rng)});
        Point y = cyl.make_point({h(rng), th(rng)});
        Geodesic g = geodesic_between(cyl, x, y);
        if (std::abs(std::abs(g.delta()[1]) - kPi) < 1e-9) continue;

        Geodesic rev = geodesic_between(cyl, y, x);
        double t = par(rng);
        Point a = g.at(t), b = rev.at(1.0 - t);
        CHECK(a.coords[0] == doctest::Approx(b.coords[0]).epsilon(1e-12));
        CHECK(std::abs(signed_angle_delta(b.coords[1], a.coords[1])) < 1e-12);

        // restriction to [t1, t2], reparametrized, agrees pointwise
        double t1 = par(rng), t2 = par(rng);
        if (t1 > t2) std::swap(t1, t2);
        Geodesic sub = geodesic_between(cyl, g.at(t1), g.at(t2));
        if (std::abs(std::abs(sub.delta()[1]) - kPi) < 1e-9) continue;
        for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            Point p = sub.at(s);
            Point q = g.at(t1 + s * (t2 - t1));
            CHECK(p.coords[0] == doctest::Approx(q.coords[0]).epsilon(1e-12));
            CHECK(std::abs(signed_angle_delta(q.coords[1], p.coords[1])) < 1e-12);
        }
        ++restriction_checked;
    }
    CHECK(restriction_checked > 100);
}

TEST_CASE("regions: membership and total convexity") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Region full(cyl, {RegionFactor::interval(-3, 3), RegionFactor::whole_circle()});
    CHECK_FALSE(full.totally_convex());
    CHECK(full.contains(cyl.make_point({0.0, 1.0}), 1e-9));
    CHECK_FALSE(full.contains(cyl.make_point({4.0, 1.0}), 1e-9));

    Region banded(cyl, {RegionFactor::interval(-3, 3), RegionFactor::arc(0.0, 1.0)});
    CHECK(banded.totally_convex());
    CHECK(banded.contains(cyl.make_point({0.0, 0.5}), 1e-9));
    CHECK_FALSE(banded.contains(cyl.make_point({0.0, 2.0}), 1e-9));
    // arcs wrap across 0
    Region wrapped(cyl, {RegionFactor::interval(-3, 3), RegionFactor::arc(-0.5, 1.0)});
    CHECK(wrapped.contains(cyl.make_point({0.0, kTwoPi - 0.25}), 1e-9));
    CHECK(wrapped.contains(cyl.make_point({0.0, 0.25}), 1e-9));

    CHECK_THROWS_AS(RegionFactor::arc(0.0, 4.0), std::invalid_argument);  // length >= pi
    CHECK_THROWS_AS(Region(cyl, {RegionFactor::whole_circle(), RegionFactor::whole_circle()}),
                    std::invalid_argument);
}

TEST_CASE("sample_region: grids, cardinality, determinism") {
    ManifoldSpec line = ManifoldSpec::euclidean_line();
    Region seg(line, {RegionFactor::interval(0, 1)});
    int counts1[] = {3};
    auto pts = sample_region(seg, counts1, false, 0);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].coords[0] == 0.0);
    CHECK(pts[1].coords[0] == 0.5);
    CHECK(pts[2].coords[0] == 1.0);

    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Region r(cyl, {RegionFactor::interval(0, 1), RegionFactor::whole_circle()});
    int counts2[] = {2, 4};
    auto grid = sample_region(r, counts2, false, 0);
    CHECK(grid.size() == 8);

    // same plan and seed give identical sequences
    auto j1 = sample_region(r, counts2, true, 42);
    auto j2 = sample_region(r, counts2, true, 42);
    REQUIRE(j1.size() == j2.size());
    for (std::size_t i = 0; i < j1.size(); ++i) CHECK(j1[i].coords == j2[i].coords);
    auto j3 = sample_region(r, counts2, true, 43);
    bool all_same = true;
    for (std::size_t i = 0; i < j1.size(); ++i) all_same = all_same && j1[i].coords == j3[i].coords;
    CHECK_FALSE(all_same);

    // jittered grids stay inside the region
    int counts3[] = {17, 8};
    auto jittered = sample_region(r, counts3, true, 7);
    for (const Point& p : jittered) CHECK(r.contains(p, 0.0));

    int zero[] = {0, 4};
    CHECK_THROWS_AS(sample_region(r, zero, false, 0), std::invalid_argument);
}

TEST_CASE("region intersection") {
    ManifoldSpec cyl = ManifoldSpec::cylinder();
    Region a(cyl, {RegionFactor::interval(-3, 1), RegionFactor::whole_circle()});
    Region b(cyl, {RegionFactor::interval(0, 3), RegionFactor::arc(0.0, 1.0)});
    auto meet = Region::intersect(a, b);
    REQUIRE(meet.has_value());
    CHECK(meet->factors()[0].lo == 0.0);
    CHECK(meet->factors()[0].hi() == 1.0);
    CHECK(meet->factors()[1].kind == RegionFactor::Kind::arc);

    Region c(cyl, {RegionFactor::interval(2, 3), RegionFactor::whole_circle()});
    CHECK_FALSE(Region::intersect(a, c).has_value());
}
