#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "windlab/continuum.hpp"
#include "windlab/harmonic.hpp"
#include "windlab/stats.hpp"

using namespace windlab;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pm_pi(double a) { return a - 2 * kPi * std::floor((a + kPi) / (2 * kPi)); }

// Continuous argument of (e^{it} - w)^2 e^{-it} tracked along the segment 0 -> w.
double tracked_mobius_arg(double t, std::complex<double> w)
{
    const double t0 = wrap_pm_pi(t);
    const auto e = std::polar(1.0, t0);
    auto f = [&](double s) { return (e - s * w) * (e - s * w) / e; };
    double a = t0;
    auto prev = f(0.0);
    const int steps = 4000;
    for (int k = 1; k <= steps; ++k) {
        const auto cur = f(double(k) / steps);
        a += std::arg(cur / prev);
        prev = cur;
    }
    return a;
}

} // namespace

TEST_CASE("strip Poisson kernel")
{
    const double r = 0.2;
    CHECK(strip_poisson_kernel(r, 0.4, 0.4) == doctest::Approx(1.0 / (2 * std::abs(std::log(r)))));
    CHECK(strip_poisson_kernel(r, 0.1, 1.7) == doctest::Approx(strip_poisson_kernel(r, 1.7, 0.1)));
    // |log r| = pi: the sech argument is (x2 - x1) / 2
    CHECK(strip_poisson_kernel(std::exp(-kPi), 0.0, 2.0) ==
          doctest::Approx(1.0 / (2 * kPi * std::cosh(1.0))).epsilon(1e-14));
    CHECK(strip_poisson_kernel(std::exp(-kPi), 0.0, 2 * kPi) ==
          doctest::Approx(1.0 / (2 * kPi * std::cosh(kPi))).epsilon(1e-14));
}

TEST_CASE("nd kernel: inner-circle trace and harmonicity")
{
    const double r = 0.15;
    for (double d : {0.0, 0.7, -2.1, 5.0})
        CHECK(nd_kernel(r, d, r, 0.0) == doctest::Approx(strip_poisson_kernel(r, d, 0.0)).epsilon(1e-13));
    // harmonic in (log rho, theta)
    const double h = 1e-3;
    for (auto [th, lr] : {std::pair{0.3, -0.8}, std::pair{-1.2, -1.5}}) {
        auto H = [&](double t, double l) { return nd_kernel(r, t, std::exp(l), 0.0); };
        const double lap = (H(th + h, lr) + H(th - h, lr) + H(th, lr + h) + H(th, lr - h) - 4 * H(th, lr)) / (h * h);
        CHECK(std::abs(lap) < 1e-5);
    }
}

TEST_CASE("huniv: positivity, conjugation, tail bound, Fourier side")
{
    const double r = 0.1;
    const auto h0 = huniv_beta(r, 0.0, 0.4, 0.3, 1.1, 30);
    CHECK(h0.value.real() > 0.0);
    CHECK(std::abs(h0.value.imag()) < 1e-15);
    for (int m = -5; m <= 5; ++m)
        CHECK(nd_kernel(r, 0.4, 0.3, 1.1 + 2 * kPi * m) > 0.0);
    const auto hp = huniv_beta(r, 0.9, 0.4, 0.3, 1.1, 30);
    const auto hm = huniv_beta(r, -0.9, 0.4, 0.3, 1.1, 30);
    CHECK(std::abs(hp.value - std::conj(hm.value)) < 1e-15);

    for (int M : {2, 4, 8}) {
        const auto lo = huniv_beta(r, 0.9, 0.4, 0.3, 1.1, M, 1.0);
        const auto hi = huniv_beta(r, 0.9, 0.4, 0.3, 1.1, M + 60, 1.0);
        CHECK(std::abs(hi.value - lo.value) <= lo.tail_bound);
    }
    CHECK_THROWS(huniv_beta(r, 0.9, 0.4, 0.3, 1.1, 0, 1e-15));

    for (double beta : {0.0, 0.9, kPi, 2.5})
        CHECK(std::abs(huniv_beta(r, beta, 0.4, 0.3, 1.1, 40).value - huniv_fourier(r, beta, 0.4, 0.3, 1.1, 200)) <
              1e-13);
}

TEST_CASE("determinant series")
{
    SUBCASE("n = 1 tends to 1/(2pi)")
    {
        MarkedAnnulus m{1e-8, {0.3}, {0.3}};
        CHECK(std::abs(annulus_det_series(m, 0.0).value - 1.0 / (2 * kPi)) < 1e-6);
    }
    SUBCASE("equals the kernel determinant")
    {
        MarkedAnnulus m{0.3, {0.2, 2.5}, {0.9, 3.7}};
        for (double b : {0.0, 0.2, 0.5}) {
            Eigen::MatrixXcd K(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    K(i, j) = huniv_fourier(m.r, 2 * kPi * b, m.inner_args[i], m.r, m.outer_args[j], 200);
            CHECK(std::abs(annulus_det_series(m, b).value - K.determinant()) < 1e-13);
        }
    }
    SUBCASE("too narrow a window is refused")
    {
        MarkedAnnulus m{0.5, {0.1, 2.0, 4.0}, {0.0, 2.1, 4.2}};
        CHECK_THROWS(annulus_det_series(m, 0.0, 1));
    }
    SUBCASE("small-r exponents")
    {
        auto fit = [](int n, double b) {
            MarkedAnnulus m;
            for (int j = 0; j < n; ++j) {
                m.inner_args.push_back(2 * kPi * j / n + 1.0 / n);
                m.outer_args.push_back(2 * kPi * j / n);
            }
            std::vector<double> x, y;
            for (double r : {1e-2, 1e-3, 1e-4}) {
                m.r = r;
                x.push_back(std::log(r));
                y.push_back(std::log(std::abs(annulus_det_series(m, b).value)));
            }
            return least_squares_line(x, y).slope;
        };
        CHECK(fit(3, 0.0) == doctest::Approx(2.0).epsilon(0.01));
        CHECK(fit(2, 0.5) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("odd-loop log ratio")
{
    // discrete value on a fine lattice with the same modulus
    const auto lat = AnnularLattice::disc(128, 8);
    const auto zip = Zipper::default_ray(lat);
    const double discrete = std::log(loop_mass_ratio(lat, zip, 0.0, kPi));
    CHECK(std::abs(discrete / odd_loop_log_ratio(16.0) - 1.0) < 0.06);
    // slope in log rho tends to 1/4
    CHECK(odd_loop_log_ratio(std::exp(41.0)) - odd_loop_log_ratio(std::exp(40.0)) ==
          doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("COE normalization and density")
{
    CHECK(coe_normalization(1).value == doctest::Approx(2 * kPi).epsilon(1e-12));
    CHECK(coe_density({1.3}) == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-12));
    // midpoint rule over the ordered sector for n = 2
    const int N = 4000;
    double q = 0.0;
    for (int i = 0; i < N; ++i) {
        const double s = 2 * kPi * (i + 0.5) / N;
        q += 2 * std::sin(s / 2) * (2 * kPi / N);
    }
    q *= 2 * kPi;
    CHECK(q == doctest::Approx(16 * kPi).epsilon(1e-6));
    CHECK(coe_normalization(2).value == doctest::Approx(q).epsilon(1e-6));
    CHECK(coe_density({0.4, 0.4 + kPi}) == doctest::Approx(2.0 / q).epsilon(1e-6));
    for (int n = 3; n <= 4; ++n) {
        const double dyson =
            std::pow(2 * kPi, n) * std::tgamma(1 + n / 2.0) / std::pow(std::tgamma(1.5), n) / std::tgamma(n);
        CHECK(coe_normalization(n).value == doctest::Approx(dyson).epsilon(1e-8));
    }
    const std::vector<double> t = {0.2, 1.9, 4.0};
    CHECK(coe_density({0.2 + 0.7, 1.9 + 0.7, 4.0 + 0.7}) == doctest::Approx(coe_density(t)).epsilon(1e-12));
    CHECK(coe_density({1.0, 0.5, 2.0}) == 0.0);
}

TEST_CASE("COE sampling")
{
    Rng rng = make_stream(21, 0);
    std::vector<double> one;
    for (int i = 0; i < 10000; ++i)
        one.push_back(coe_sample(1, rng)[0]);
    CHECK(ks_statistic(one, [](double x) { return std::clamp(x / (2 * kPi), 0.0, 1.0); }) < 0.02);

    std::vector<double> gaps;
    for (int i = 0; i < 10000; ++i)
        gaps.push_back(ccw_gaps(coe_sample(2, rng))[0]);
    const auto m = mean_se(gaps);
    CHECK(std::abs(m.mean - kPi) < 3 * m.se);
    // CDF of sin(s/2)/4 by trapezoid quadrature
    auto cdf = [](double s) {
        s = std::clamp(s, 0.0, 2 * kPi);
        const int N = 400;
        double a = 0.0;
        for (int k = 0; k < N; ++k) {
            const double u0 = s * k / N, u1 = s * (k + 1) / N;
            a += 0.5 * (std::sin(u0 / 2) + std::sin(u1 / 2)) / 4 * (u1 - u0);
        }
        return a;
    };
    CHECK(std::abs(cdf(2.0) - coe_gap_cdf_n2(2.0)) < 1e-5);
    CHECK(ks_statistic(gaps, cdf) < 0.02);

    for (int i = 0; i < 200; ++i) {
        const auto s = coe_sample(4, rng);
        CHECK(s[0] >= 0.0);
        CHECK(s[0] < 2 * kPi);
        for (int j = 0; j < 3; ++j)
            CHECK(s[j + 1] > s[j]);
        CHECK(s[3] < s[0] + 2 * kPi);
    }
}

TEST_CASE("disc Green function")
{
    const std::complex<double> w(0.3, -0.4), z(-0.2, 0.1);
    CHECK(disc_green(0.0, w) == doctest::Approx(-std::log(std::abs(w))));
    CHECK(disc_green(z, w) == doctest::Approx(disc_green(w, z)));
    CHECK(disc_green(z, std::polar(1.0 - 1e-9, 0.7)) < 1e-8);
    CHECK_THROWS(disc_green(z, z));
}

TEST_CASE("frak_h")
{
    const double kappa = 2.0;
    const std::vector<double> th = {3.5, -0.4, 7.0};
    double s = 0.0;
    for (double t : th)
        s += wrap_pm_pi(t);
    CHECK(frak_h(th, kappa, 0.0) == doctest::Approx(-s / std::sqrt(kappa)).epsilon(1e-14));
    // on the radius toward e^{i theta} only the lifted angle survives
    CHECK(frak_h({1.1}, kappa, std::polar(0.6, 1.1)) == doctest::Approx(-1.1 / std::sqrt(kappa)).epsilon(1e-14));
    for (std::complex<double> w : {std::complex<double>(0.5, 0.3), std::complex<double>(-0.7, -0.2),
                                   std::complex<double>(0.1, 0.85)}) {
        double want = 0.0;
        for (double t : th)
            want += tracked_mobius_arg(t, w);
        CHECK(frak_h(th, kappa, w) == doctest::Approx(-want / std::sqrt(kappa)).epsilon(1e-9));
        CHECK(std::abs(frak_h(th, kappa, w) - frak_h(th, kappa, w + std::complex<double>(1e-5, 0))) < 1e-3);
    }
}

TEST_CASE("hitting law goodness of fit")
{
    Rng rng = make_stream(22, 0);
    for (int n : {2, 3}) {
        std::vector<std::vector<double>> coe;
        for (int i = 0; i < 3000; ++i)
            coe.push_back(coe_sample(n, rng));
        CHECK(hitting_gof_test(coe, n, 5, 20000).pass);
    }
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    std::vector<std::vector<double>> flat;
    for (int i = 0; i < 10000; ++i) {
        double a = u(rng), b = u(rng);
        flat.push_back({std::min(a, b), std::max(a, b)});
    }
    CHECK(!hitting_gof_test(flat, 2).pass);
    CHECK_THROWS(hitting_gof_test(std::vector<std::vector<double>>(10, {0.0, 1.0}), 2));
}
