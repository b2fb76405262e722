#include <algorithm>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "windlab/lattice.hpp"

using namespace windlab;

TEST_CASE("square 5x5 minus center counts")
{
    const auto lat = AnnularLattice::square(2, 0);
    CHECK(lat.size() == 24);
    CHECK(lat.outer_boundary().size() == 16);
    CHECK(lat.inner_boundary().size() == 4);
    CHECK(lat.free_count() == 8);
}

TEST_CASE("disc(2, 0) is the radius-2 ball minus the origin")
{
    const auto lat = AnnularLattice::disc(2, 0);
    std::set<std::pair<int, int>> want;
    for (int x = -2; x <= 2; ++x)
        for (int y = -2; y <= 2; ++y)
            if (x * x + y * y <= 4 && (x || y))
                want.insert({x, y});
    std::set<std::pair<int, int>> got;
    for (const auto& p : lat.points())
        got.insert({p.x, p.y});
    CHECK(got == want);
    std::set<std::pair<int, int>> inner;
    for (int v : lat.inner_boundary())
        inner.insert({lat.point(v).x, lat.point(v).y});
    CHECK(inner == std::set<std::pair<int, int>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

TEST_CASE("disc(40, 4) vertex count by direct enumeration")
{
    const auto lat = AnnularLattice::disc(40, 4);
    int count = 0;
    for (int x = -40; x <= 40; ++x)
        for (int y = -40; y <= 40; ++y) {
            const int d = x * x + y * y;
            if (d <= 1600 && d > 16)
                ++count;
        }
    CHECK(lat.size() == count);
}

TEST_CASE("lattice invariants")
{
    for (const auto& lat : {AnnularLattice::square(4, 1), AnnularLattice::disc(12, 3)}) {
        for (int v = 0; v < lat.size(); ++v) {
            CHECK(lat.degree(v) >= 1);
            CHECK(lat.degree(v) <= 4);
            if (!lat.is_outer(v) && !lat.is_inner(v))
                CHECK(lat.degree(v) == 4);
            CHECK(!(lat.is_outer(v) && lat.is_inner(v)));
        }
        CHECK(!lat.outer_boundary().empty());
        CHECK(!lat.inner_boundary().empty());
    }
}

TEST_CASE("bad radii are rejected")
{
    CHECK_THROWS_AS(AnnularLattice::disc(3, 2), std::invalid_argument);
    CHECK_THROWS(AnnularLattice::disc(-1, 0));
}

TEST_CASE("default ray crossings and signs")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    std::vector<std::pair<Point, Point>> edges;
    for (auto [a, b] : zip.crossed_edges())
        edges.push_back({lat.point(a), lat.point(b)});
    REQUIRE(edges.size() == 2);
    auto same_edge = [](std::pair<Point, Point> e, Point p, Point q) {
        return (e.first == p && e.second == q) || (e.first == q && e.second == p);
    };
    CHECK(same_edge(edges[0], {1, 0}, {1, 1}));
    CHECK(same_edge(edges[1], {2, 0}, {2, 1}));
    CHECK(zip.crossing_sign(lat.at(1, 1), lat.at(1, 0)) == 1);
    CHECK(zip.crossing_sign(lat.at(1, 0), lat.at(1, 1)) == -1);
    CHECK(zip.crossing_sign(lat.at(1, 1), lat.at(0, 1)) == 0);
    CHECK_THROWS(zip.crossing_sign(lat.at(1, 1), lat.at(-1, 1)));
    for (int u = 0; u < lat.size(); ++u)
        for (int w : lat.neighbors(u))
            CHECK(zip.crossing_sign(u, w) == -zip.crossing_sign(w, u));
}

TEST_CASE("crossing number of hand-built paths")
{
    const auto lat = AnnularLattice::square(3, 0);
    const auto zip = Zipper::default_ray(lat);
    auto path = [&](std::vector<Point> pts) {
        LatticePath p;
        for (auto q : pts)
            p.push_back(lat.at(q.x, q.y));
        return p;
    };
    const auto avoid = path({{-1, 0}, {-2, 0}, {-3, 0}});
    CHECK(crossing_number(zip, avoid) == 0);

    // one counterclockwise turn around the hole, then out through (0, -3)
    const auto loop = path({{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {0, -2},
                            {0, -3}});
    const int k = crossing_number(zip, loop);
    CHECK(std::abs(k) == 1);
    // sign +1 is a clockwise crossing of the ray
    CHECK(k == -1);
    LatticePath rev(loop.rbegin(), loop.rend());
    CHECK(crossing_number(zip, rev) == -k);
}

TEST_CASE("lattice json export lists every vertex")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const auto j = nlohmann::json::parse(lattice_to_json(lat, &zip));
    CHECK(j["vertices"].size() == 24);
    CHECK(j["zipper"].size() == 2);
}
