#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "windlab/continuum.hpp"
#include "windlab/sde.hpp"
#include "windlab/stats.hpp"

using namespace windlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Dyson BM with n = 1 is Brownian")
{
    Rng rng = make_stream(31, 0);
    std::vector<double> ends;
    for (int i = 0; i < 10000; ++i) {
        const auto p = simulate_dbm(1, 2.0, 2.0, {0.5}, 1.0, 1e-3, rng, 1000);
        ends.push_back(p.thetas.back()[0] - 0.5);
    }
    const auto v = variance_se(ends);
    CHECK(std::abs(v.mean - 2.0) < 3 * v.se);
    CHECK(std::abs(mean_se(ends).mean) < 3 * mean_se(ends).se);
}

TEST_CASE("variance of the angle sum")
{
    Rng rng = make_stream(32, 0);
    std::vector<double> sums;
    for (int i = 0; i < 3000; ++i) {
        const auto p = dbm_with_coe_start(3, 2.0, 1.0, 1e-3, rng, 1000);
        double s = 0.0;
        for (int j = 0; j < 3; ++j)
            s += p.thetas.back()[j] - p.thetas.front()[j];
        sums.push_back(s);
    }
    const auto v = variance_se(sums);
    CHECK(std::abs(v.mean - 6.0) < 3 * v.se);
}

namespace {
// Gap CDF for the n = 2 density proportional to sin^a(s/2), by the midpoint rule.
double sine_power_cdf(double a, double s)
{
    const int N = 4000;
    double part = 0.0, total = 0.0;
    for (int k = 0; k < N; ++k) {
        const double u = 2 * kPi * (k + 0.5) / N;
        const double f = std::pow(std::sin(u / 2), a);
        total += f;
        if (u < s)
            part += f;
    }
    return part / total;
}
} // namespace

TEST_CASE("Dyson BM keeps order, stays apart, relaxes to its stationary law")
{
    Rng rng = make_stream(33, 0);
    std::vector<std::vector<double>> start, end;
    double min_gap = INFINITY;
    for (int i = 0; i < 2000; ++i) {
        const auto p = dbm_with_coe_start(2, 2.0, 1.0, 1e-3, rng, 10);
        for (const auto& th : p.thetas) {
            const double g = th[1] - th[0];
            CHECK(g > 0.0);
            CHECK(g < 2 * kPi);
            min_gap = std::min({min_gap, g, 2 * kPi - g});
        }
        start.push_back(p.thetas.front());
        end.push_back(p.thetas.back());
    }
    CHECK(min_gap > 0.0);
    CHECK(hitting_gof_test(start, 2).pass);
    // drift 2 cot with kappa = 2 has invariant density prop. to prod sin^4, so
    // the COE start is not stationary: by t = 1 the gaps follow the sin^4 law
    std::vector<double> gaps;
    for (const auto& th : end)
        gaps.push_back(th[1] - th[0]);
    CHECK(ks_statistic(gaps, [](double s) { return sine_power_cdf(4.0, s); }) < ks_critical_1pct(gaps.size()));
    CHECK(!hitting_gof_test(end, 2).pass);

    const auto p3 = dbm_with_coe_start(4, 2.0, 2.0, 1e-3, rng);
    for (const auto& th : p3.thetas) {
        for (int j = 0; j < 3; ++j)
            CHECK(th[j + 1] > th[j]);
        CHECK(th[3] < th[0] + 2 * kPi);
    }
    CHECK_THROWS(simulate_dbm(2, 2.0, 2.0, {0.0, 1.0}, 1.0, 1e-2, rng));
}

TEST_CASE("SLE(rho) driver")
{
    Rng rng = make_stream(34, 0);
    SUBCASE("no force points is Brownian")
    {
        std::vector<double> ends;
        for (int i = 0; i < 5000; ++i)
            ends.push_back(sle_rho_driver(3.0, {}, 0.2, {}, 0.5, 1e-3, rng, 500).theta.back() - 0.2);
        const auto v = variance_se(ends);
        CHECK(std::abs(v.mean - 1.5) < 3 * v.se);
    }
    SUBCASE("kappa = 0 against the closed-form ODE solution")
    {
        // one force point: u = (V - Theta)/2 has cos u(t) = cos u(0) exp(-(1 + rho/2) t / 2),
        // and Theta + (rho/2) V is conserved
        const double rho = 2.0, th0 = 0.3, v0 = 2.3, t = 0.8;
        const auto p = sle_rho_driver(0.0, {rho}, th0, {v0}, t, 1e-3, rng);
        const double u0 = 0.5 * (v0 - th0);
        const double u = std::acos(std::cos(u0) * std::exp(-(1 + rho / 2) * t / 2));
        const double c = th0 + 0.5 * rho * v0;
        const double v = (c + 2 * u) / (1 + rho / 2);
        CHECK(std::abs(p.force.back()[0] - v) < 1e-6);
        CHECK(std::abs(p.theta.back() - (v - 2 * u)) < 1e-6);
    }
    SUBCASE("rho = 2 force points never meet the driver")
    {
        for (int i = 0; i < 2000; ++i) {
            const auto p = sle_rho_driver(2.0, {2.0, 2.0}, 0.0, {2 * kPi / 3, 4 * kPi / 3}, 0.5, 1e-3, rng, 10);
            for (std::size_t k = 0; k < p.times.size(); ++k)
                for (double f : p.force[k]) {
                    CHECK(f - p.theta[k] > 0.0);
                    CHECK(f - p.theta[k] < 2 * kPi);
                }
        }
    }
}

TEST_CASE("radial Loewner flow")
{
    Rng rng = make_stream(35, 0);
    const auto path = dbm_with_coe_start(3, 2.0, 0.3, 1e-3, rng);
    const auto flow = loewner_flow(path, {0.0, {0.1, 0.2}});
    for (std::size_t k = 0; k < flow.times.size(); ++k) {
        CHECK(std::abs(flow.g[k][0]) < 1e-15);
        CHECK(std::abs(flow.log_gprime[k][0].real() - 3 * flow.times[k]) < 1e-6);
    }

    // constant driver: the antipodal boundary point stays on the circle
    const double th = 0.7;
    std::vector<double> times;
    std::vector<std::vector<double>> drivers;
    for (int k = 0; k <= 100; ++k) {
        times.push_back(0.01 * k);
        drivers.push_back({th});
    }
    const auto f2 = loewner_flow(times, drivers, {std::polar(1.0, th + kPi)});
    for (const auto& g : f2.g)
        CHECK(std::abs(std::abs(g[0]) - 1.0) < 1e-9);
}

TEST_CASE("traces")
{
    const double th = 1.2;
    std::vector<double> times;
    std::vector<std::vector<double>> drivers;
    for (int k = 0; k <= 50; ++k) {
        times.push_back(0.01 * k);
        drivers.push_back({th});
    }
    const auto tr = trace_points(times, drivers, 1e-3);
    REQUIRE(tr.size() == 1);
    CHECK(std::abs(tr[0][0] - std::polar(1.0, th)) < 2e-3);
    CHECK(std::abs(tr[0].back()) < 1.0 - 1e-2);
    for (const auto& z : tr[0]) {
        // distance from the radius through e^{i th}
        const double off = std::abs((z * std::polar(1.0, -th)).imag());
        CHECK(off < 1e-3);
    }

    Rng rng = make_stream(36, 0);
    const auto path = dbm_with_coe_start(2, 2.0, 0.2, 1e-3, rng, 10);
    const auto t2 = trace_points(path, 1e-3);
    for (const auto& curve : t2) {
        CHECK(std::abs(std::abs(curve.front()) - 1.0) < 2e-3);
        CHECK(std::abs(curve.back()) < 1.0);
    }
}

TEST_CASE("single-curve winding is standard normal")
{
    const auto w = sle_winding_experiment(1, 2.0, 1.0, 10000, 37);
    std::vector<double> x;
    for (const auto& r : w.normalized)
        x.push_back(r[0]);
    CHECK(ks_statistic(x, [](double v) { return 0.5 * std::erfc(-v / std::sqrt(2.0)); }) < 0.02);
}

TEST_CASE("sample covariance")
{
    const auto c = sample_covariance({{1.0, 2.0}, {3.0, 6.0}, {5.0, 10.0}});
    CHECK(c[0][0] == doctest::Approx(4.0));
    CHECK(c[0][1] == doctest::Approx(8.0));
    CHECK(c[1][1] == doctest::Approx(16.0));
}

TEST_CASE("GFF martingale check")
{
    const auto g = gff_martingale_check(2.0, 2, {0.15, 0.05}, {-0.15, -0.05}, 0.3, 1e-4, 400, 38);
    CHECK(std::abs(g.mean_drift) < 3 * g.stderr_drift);
    CHECK(g.qv_mismatch < 0.05);
    CHECK_THROWS(gff_martingale_check(2.0, 2, {0.2, 0.1}, {0.2, 0.1}, 0.3, 1e-4, 100, 1));
}
