#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "windlab/harmonic.hpp"
#include "windlab/wilson.hpp"

using namespace windlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> reachable_outer(const AnnularLattice& lat)
{
    std::vector<int> out;
    for (int v : lat.outer_boundary())
        if (std::any_of(lat.neighbors(v).begin(), lat.neighbors(v).end(), [&](int w) { return !lat.is_outer(w); }))
            out.push_back(v);
    return out;
}

} // namespace

TEST_CASE("random walk stopping rule")
{
    const auto lat = AnnularLattice::square(3, 1);
    Rng rng = make_stream(1, 0);
    const int o = lat.outer_boundary()[0];
    CHECK(random_walk(lat, o, rng).size() == 1);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_walk(lat, lat.inner_boundary()[i % lat.inner_boundary().size()], rng);
        CHECK(lat.is_outer(p.back()));
        CHECK(std::none_of(p.begin(), p.end() - 1, [&](int v) { return lat.is_outer(v); }));
    }
}

TEST_CASE("random walk hitting distribution matches the harmonic measure")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::none(lat);
    const int x = lat.at(0, 1);
    Rng rng = make_stream(2, 0);
    const int samples = 1000000;
    std::map<int, int> hits;
    for (int i = 0; i < samples; ++i)
        ++hits[random_walk(lat, x, rng).back()];
    for (int v : lat.outer_boundary()) {
        const double exact = hitting_kernel(lat, zip, 0.0, v).values[x].real();
        const double p = double(hits[v]) / samples;
        CHECK(std::abs(p - exact) <= 3 * std::sqrt(exact * (1 - exact) / samples) + 1e-12);
    }
}

TEST_CASE("loop erasure")
{
    const auto lat = AnnularLattice::square(3, 0);
    auto path = [&](std::vector<Point> pts) {
        LatticePath p;
        for (auto q : pts)
            p.push_back(lat.at(q.x, q.y));
        return p;
    };
    const auto simple = path({{1, 0}, {2, 0}, {3, 0}});
    CHECK(loop_erase(simple) == simple);
    CHECK(loop_erase(path({{0, 1}, {1, 1}, {1, 2}, {1, 1}, {2, 1}})) == path({{0, 1}, {1, 1}, {2, 1}}));
    Rng rng = make_stream(3, 0);
    for (int i = 0; i < 100; ++i) {
        const auto w = random_walk(lat, lat.at(1, 0), rng);
        const auto e = loop_erase(w);
        CHECK(loop_erase(e) == e);
        CHECK(std::set<int>(e.begin(), e.end()).size() == e.size());
    }
}

TEST_CASE("wilson on a tree and on a cycle")
{
    SUBCASE("path graph")
    {
        AnnularLattice lat({{0, 0}, {1, 0}, {2, 0}}, {0, 0, 1}, {1, 0, 0}, 1.0, false);
        Rng rng = make_stream(4, 0);
        const auto t = wilson_ust(lat, rng);
        CHECK(t.parent == std::vector<int>{1, 2, -1});
        CHECK(matrix_tree_count(lat) == 1);
    }
    SUBCASE("4-cycle wired at one vertex")
    {
        AnnularLattice lat({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {0, 0, 0, 1}, {1, 0, 0, 0}, 1.0, false);
        const auto trees = enumerate_spanning_trees(lat);
        CHECK(trees.size() == 4);
        CHECK(matrix_tree_count(lat) == 4);
        for (const auto& t : trees)
            CHECK(is_arborescence(lat, t));
    }
}

TEST_CASE("enumeration on the oracle annulus")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto trees = enumerate_spanning_trees(lat);
    CHECK(static_cast<long long>(trees.size()) == matrix_tree_count(lat));
    std::set<std::vector<int>> distinct;
    for (const auto& t : trees) {
        CHECK(is_arborescence(lat, t));
        distinct.insert(t.parent);
    }
    CHECK(distinct.size() == trees.size());
    Rng rng = make_stream(5, 0);
    for (int i = 0; i < 100; ++i)
        CHECK(is_arborescence(lat, wilson_ust(lat, rng)));
}

TEST_CASE("wilson uniformity")
{
    const auto r = wilson_uniformity_test(AnnularLattice::square(2, 0), 20000, 6);
    CHECK(r.p_value > 0.001);
}

TEST_CASE("conditioned branches")
{
    const auto lat = AnnularLattice::square(3, 0);
    Rng rng = make_stream(7, 0);
    BranchSampler sampler(lat);
    BranchTuple t;
    for (int i = 0; i < 50; ++i)
        CHECK(sampler.attempt({lat.inner_boundary()[i % 4]}, rng, t));

    const std::vector<int> xs = {lat.at(1, 0), lat.at(0, 1), lat.at(-1, 0)};
    for (int i = 0; i < 20; ++i) {
        const auto s = sample_conditioned_branches(lat, xs, rng);
        std::set<int> used;
        std::size_t total = 0;
        for (const auto& b : s.tuple.branches) {
            used.insert(b.begin(), b.end());
            total += b.size();
            CHECK(lat.is_outer(b.back()));
        }
        CHECK(used.size() == total);
        // endpoints follow the starting points around the circle
        std::vector<double> ends;
        for (const auto& b : s.tuple.branches)
            ends.push_back(std::atan2(double(lat.point(b.back()).y), double(lat.point(b.back()).x)));
        int descents = 0;
        for (std::size_t j = 0; j < ends.size(); ++j)
            descents += ends[(j + 1) % ends.size()] < ends[j];
        CHECK(descents == 1);
    }
}

TEST_CASE("acceptance rate for n = 2 matches summed determinants")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(0, 1), lat.at(0, -1)};
    const auto outs = reachable_outer(lat);
    double exact = 0.0;
    for (std::size_t i = 0; i < outs.size(); ++i)
        for (std::size_t j = i + 1; j < outs.size(); ++j)
            try {
                exact += winding_cf_exact(lat, zip, 0.0, xs, {outs[i], outs[j]}).event_probability;
            } catch (const std::domain_error&) {
            }
    Rng rng = make_stream(8, 0);
    BranchSampler sampler(lat);
    BranchTuple t;
    const int attempts = 200000;
    int ok = 0;
    for (int i = 0; i < attempts; ++i)
        ok += sampler.attempt(xs, rng, t);
    const double p = double(ok) / attempts;
    CHECK(std::abs(p - exact) < 3 * std::sqrt(p * (1 - p) / attempts));
}

TEST_CASE("winding CF Monte Carlo")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(1, 0), lat.at(-1, 0)};
    const std::vector<int> vs = {lat.at(2, 1), lat.at(-2, -1)};
    const auto zero = winding_cf_mc(lat, zip, 0.0, xs, vs, 500, 9);
    CHECK(zero.estimate == std::complex<double>(1.0, 0.0));
    CHECK(zero.se_re == 0.0);
    CHECK(zero.se_im == 0.0);

    const auto mc = winding_cf_mc(lat, zip, kPi / 3, xs, vs, 20000, 10);
    const auto ex = winding_cf_exact(lat, zip, kPi / 3, xs, vs);
    CHECK(std::abs(mc.estimate) <= 1.0 + 1e-12);
    CHECK(std::abs(mc.estimate.real() - ex.cf.real()) < 3 * mc.se_re + 1e-12);
    CHECK(std::abs(mc.estimate.imag() - ex.cf.imag()) < 3 * mc.se_im + 1e-12);
}

TEST_CASE("brute force equals the exact engine with parity")
{
    const auto lat = AnnularLattice::square(2, 0);
    const auto zip = Zipper::default_ray(lat);
    const std::vector<int> xs = {lat.at(0, 1), lat.at(0, -1)};
    const std::vector<int> vs = {lat.at(-2, 1), lat.at(2, -1)};
    CHECK(std::abs(brute_force_winding_cf(lat, zip, 0.0, xs, vs).cf - 1.0) < 1e-12);
    for (double b : {0.7, kPi / 3, kPi}) {
        const auto bf = brute_force_winding_cf(lat, zip, b, xs, vs);
        const auto ex = winding_cf_exact(lat, zip, b, xs, vs);
        CHECK(std::abs(bf.cf - ex.cf) < 1e-8);
        CHECK(std::abs(bf.event_probability - ex.event_probability) < 1e-8);
        CHECK(bf.parity_holds);
    }
}
