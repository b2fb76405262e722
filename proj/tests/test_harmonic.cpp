#include <cmath>
#include <numbers>

#include "doctest.h"
#include "windlab/harmonic.hpp"
#include "windlab/rng.hpp"
#include "windlab/stats.hpp"
#include "windlab/wilson.hpp"

using namespace windlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Rooted closed walks on the free vertices, weighted by prod 1/deg and the
// zipper phase, summed as sum_m (1/m) sum_{|l| = m} (w_b1(l) - w_b2(l)).
double loop_sum(const AnnularLattice& lat, const Zipper& zip, double b1, double b2, int max_len)
{
    double total = 0.0;
    std::vector<int> stack;
    std::function<void(int, int, double, int)> walk = [&](int start, int v, double w, int k) {
        const int m = static_cast<int>(stack.size());
        if (m > 0 && v == start)
            total += w * (std::cos(b1 * k) - std::cos(b2 * k)) / m;
        if (m == max_len)
            return;
        for (int u : lat.neighbors(v)) {
            if (lat.is_outer(u))
                continue;
            stack.push_back(u);
            walk(start, u, w / lat.degree(v), k + zip.crossing_sign(v, u));
            stack.pop_back();
        }
    };
    for (int i = 0; i < lat.free_count(); ++i)
        walk(lat.free_vertex(i), lat.free_vertex(i), 1.0, 0);
    return total;
}

} // namespace

TEST_CASE("hitting kernel boundary data and total mass")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const auto& outer = lat.outer_boundary();
    std::vector<double> sum(lat.size(), 0.0);
    for (int v : outer) {
        const auto h = hitting_kernel(lat, zip, 0.0, v);
        CHECK(h.residual < 1e-10);
        for (int x = 0; x < lat.size(); ++x)
            sum[x] += h.values[x].real();
        for (int u : outer)
            CHECK(std::abs(h.values[u] - cplx(u == v ? 1.0 : 0.0)) < 1e-14);
        const auto hb = hitting_kernel(lat, zip, 1.3, v);
        CHECK(std::abs(hb.values[v] - 1.0) < 1e-14);
    }
    for (int x = 0; x < lat.size(); ++x)
        CHECK(sum[x] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hitting kernel vs random walk Monte Carlo")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const int x = lat.at(1, 0), v = lat.at(2, -1);
    const double exact = hitting_kernel(lat, zip, 0.0, v).values[x].real();
    Rng rng = make_stream(77, 0);
    const int samples = 1000000;
    int hits = 0;
    for (int i = 0; i < samples; ++i)
        hits += random_walk(lat, x, rng).back() == v;
    const double p = double(hits) / samples;
    const double se = std::sqrt(p * (1 - p) / samples);
    CHECK(std::abs(p - exact) < 3 * se);
}

TEST_CASE("fomin determinant small cases")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const int x1 = lat.at(1, 0), x2 = lat.at(-1, 0);
    const int v1 = lat.at(2, 1), v2 = lat.at(-2, -1);
    const double beta = 0.9;
    const auto h = hitting_kernel(lat, zip, beta, v1);
    CHECK(std::abs(fomin_determinant(lat, zip, beta, {x1}, {v1}) - h.values[x1]) < 1e-13);
    const auto d12 = fomin_determinant(lat, zip, beta, {x1, x2}, {v1, v2});
    const auto d21 = fomin_determinant(lat, zip, beta, {x2, x1}, {v1, v2});
    CHECK(std::abs(d12 + d21) < 1e-13);
}

TEST_CASE("det(h_0) is the event probability for odd n")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(1, 0), lat.at(0, 1), lat.at(-1, 0)};
    const std::vector<int> vs = {lat.at(2, 1), lat.at(-1, 2), lat.at(-2, -1)};
    const auto cx = canonical_order(zip, xs), cv = canonical_order(zip, vs);
    const double det0 = fomin_determinant(lat, zip, 0.0, cx, cv).real();
    CHECK(det0 == doctest::Approx(brute_force_winding_cf(lat, zip, 0.0, xs, vs).event_probability).epsilon(1e-10));
}

TEST_CASE("even-n event probability vs conditioned sampling")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(1, 0), lat.at(-1, 0)};
    const std::vector<int> vs = {lat.at(2, 1), lat.at(-2, -1)};
    const double exact = winding_cf_exact(lat, zip, 0.0, xs, vs).event_probability;
    const auto cx = canonical_order(zip, xs), cv = canonical_order(zip, vs);
    const double pi_form = loop_mass_ratio(lat, zip, 0.0, kPi) * fomin_determinant(lat, zip, kPi, cx, cv).real();
    CHECK(exact == doctest::Approx(pi_form).epsilon(1e-12));

    Rng rng = make_stream(78, 0);
    BranchSampler sampler(lat);
    BranchTuple t;
    const int attempts = 400000;
    int hits = 0;
    for (int i = 0; i < attempts; ++i)
        if (sampler.attempt(xs, rng, t)) {
            const int e0 = t.branches[0].back(), e1 = t.branches[1].back();
            hits += (e0 == vs[0] && e1 == vs[1]) || (e0 == vs[1] && e1 == vs[0]);
        }
    const double p = double(hits) / attempts;
    const double se = std::sqrt(p * (1 - p) / attempts);
    CHECK(std::abs(p - exact) < 3 * se);
}

TEST_CASE("loop mass ratio identities")
{
    const auto lat = AnnularLattice::square(3, 0);
    const auto zip = Zipper::default_ray(lat);
    CHECK(loop_mass_ratio(lat, zip, 0.8, 0.8) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(loop_mass_ratio(lat, zip, 0.8 + 2 * kPi, 0.8) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("loop mass ratio vs exhaustive loop enumeration")
{
    // 8 free vertices forming a ring around the hole
    const auto lat = AnnularLattice::square(2, 0);
    REQUIRE(lat.free_count() <= 12);
    const auto zip = Zipper::default_ray(lat);
    const int max_len = 20;
    // every free vertex has at most 2 free neighbours out of degree >= 3
    const double rho = 2.0 / 3.0;
    const double tail = 2.0 * lat.free_count() * std::pow(rho, max_len + 1) / (max_len + 1) / (1 - rho);
    for (auto [b1, b2] : {std::pair{0.0, kPi}, std::pair{0.4, 1.7}, std::pair{kPi / 2, 0.0}}) {
        const double lhs = std::log(loop_mass_ratio(lat, zip, b1, b2));
        CHECK(std::abs(lhs - loop_sum(lat, zip, b1, b2, max_len)) < tail);
    }
}

TEST_CASE("winding_cf_exact basics")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(0, 1), lat.at(0, -1)};
    const std::vector<int> vs = {lat.at(-2, 1), lat.at(2, -1)};
    CHECK(std::abs(winding_cf_exact(lat, zip, 0.0, xs, vs).cf - 1.0) < 1e-12);
    // a corner has no free neighbour, so no branch can end there
    CHECK_THROWS_AS(winding_cf_exact(lat, zip, 0.5, xs, {lat.at(-2, 2), lat.at(2, -1)}), std::domain_error);
    for (double b : {0.3, 1.1, 2.5, kPi})
        CHECK(std::abs(winding_cf_exact(lat, zip, b, xs, vs).cf) <= 1.0 + 1e-12);
}

TEST_CASE("green function")
{
    SUBCASE("single vertex with absorbed neighbours")
    {
        std::vector<Point> pts = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        std::vector<char> outer = {0, 1, 1, 1, 1}, inner = {1, 0, 0, 0, 0};
        AnnularLattice lat(pts, outer, inner, 1.0, false);
        CHECK(green_nd(lat, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto lat = AnnularLattice::square(2, 0);
    SUBCASE("reversibility")
    {
        for (int z = 0; z < lat.size(); ++z)
            for (int w = 0; w < lat.size(); ++w)
                if (!lat.is_outer(z) && !lat.is_outer(w))
                    CHECK(green_nd(lat, z, w) * lat.degree(z) ==
                          doctest::Approx(green_nd(lat, w, z) * lat.degree(w)).epsilon(1e-12));
    }
    SUBCASE("visit counts")
    {
        const int z = lat.at(1, 0), w = lat.at(1, 1);
        Rng rng = make_stream(79, 0);
        std::vector<double> visits;
        for (int i = 0; i < 200000; ++i) {
            const auto p = random_walk(lat, z, rng);
            visits.push_back(double(std::count(p.begin(), p.end(), w)));
        }
        const auto m = mean_se(visits);
        CHECK(std::abs(m.mean - green_nd(lat, z, w)) < 3 * m.se);
    }
    CHECK_THROWS(green_nd(lat, lat.outer_boundary()[0], lat.at(1, 0)));
}
