#include "windlab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "windlab/stats.hpp"

namespace windlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_pm_pi(double a)
{
    double x = std::fmod(a + kPi, kTwoPi);
    if (x < 0)
        x += kTwoPi;
    return x - kPi;
}

double wrap_2pi(double a)
{
    double x = std::fmod(a, kTwoPi);
    if (x < 0)
        x += kTwoPi;
    return x;
}

void check_r(double r)
{
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("inner radius must lie in (0, 1)");
}

void check_ccw(const std::vector<double>& a, const char* what)
{
    if (a.size() < 2)
        return;
    double total = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double g = wrap_2pi(a[(j + 1) % a.size()] - a[j]);
        if (!(g > 0.0))
            throw std::invalid_argument(std::string(what) + ": repeated angle");
        total += g;
    }
    if (std::abs(total - kTwoPi) > 1e-9)
        throw std::invalid_argument(std::string(what) + ": angles are not in ccw order");
}

// cosh(x (L - u)) / cosh(x L) for 0 <= u <= L, without overflow.
double cosh_ratio(double x, double len, double u)
{
    const double ax = std::abs(x);
    return std::exp(-ax * u) * (1.0 + std::exp(-2.0 * ax * (len - u))) / (1.0 + std::exp(-2.0 * ax * len));
}

double sech(double x)
{
    const double ax = std::abs(x);
    return 2.0 * std::exp(-ax) / (1.0 + std::exp(-2.0 * ax));
}

} // namespace

double MarkedAnnulus::c() const
{
    double s = 0.0;
    for (double a : inner_args)
        s += a;
    for (double a : outer_args)
        s -= a;
    return reduce_pm_pi(s);
}

void MarkedAnnulus::validate() const
{
    check_r(r);
    if (inner_args.empty() || inner_args.size() != outer_args.size())
        throw std::invalid_argument("MarkedAnnulus: need the same positive number of inner and outer points");
    check_ccw(inner_args, "inner_args");
    check_ccw(outer_args, "outer_args");
}

SleConstants::SleConstants(double k) : kappa(k), chi(2.0 / std::sqrt(k) - std::sqrt(k) / 2.0), lambda(kPi / std::sqrt(k))
{
    if (!(k > 0.0))
        throw std::invalid_argument("kappa must be positive");
}

double strip_poisson_kernel(double r, double x1, double x2)
{
    check_r(r);
    const double len = std::abs(std::log(r));
    return sech(kPi * (x2 - x1) / (2.0 * len)) / (2.0 * len);
}

double nd_kernel(double r, double theta, double rho, double phi)
{
    check_r(r);
    if (!(rho >= r && rho < 1.0))
        throw std::invalid_argument("nd_kernel: starting point must satisfy r <= |x| < 1");
    const double len = -std::log(r);
    const double u = -std::log(rho);
    const double a = kPi * u / (2.0 * len);
    const double b = kPi * (theta - phi) / (2.0 * len);
    const double ch = std::cosh(b);
    const double ca = std::cos(a);
    return std::sin(a) / (2.0 * len * (ch - ca * ca / ch));
}

HunivResult huniv_beta(double r, double beta, double arg_x, double rho_x, double arg_w, int truncation,
                       double tolerance)
{
    if (truncation < 1)
        throw std::invalid_argument("huniv_beta: truncation must be at least 1");
    check_r(r);
    const double len = -std::log(r);
    HunivResult out;
    out.truncation = truncation;
    for (int m = -truncation; m <= truncation; ++m)
        out.value += std::polar(nd_kernel(r, arg_x, rho_x, arg_w + kTwoPi * m), m * beta);

    // Each tail term is at most cosh B / (2L sinh^2 B) with B >= B_min, and
    // successive B grow by pi^2 / L.
    const double d0 = std::abs(arg_x - arg_w);
    const double bmin = kPi * (kTwoPi * (truncation + 1) - d0) / (2.0 * len);
    if (bmin <= 0.0) {
        out.tail_bound = INFINITY;
    } else {
        const double q = std::exp(-2.0 * bmin);
        const double first = std::exp(-bmin) * (1.0 + q) / ((1.0 - q) * (1.0 - q)) / len;
        out.tail_bound = 2.0 * first / (1.0 - std::exp(-kPi * kPi / len));
    }
    if (!(out.tail_bound <= tolerance))
        throw std::runtime_error("huniv_beta: truncation tail bound " + std::to_string(out.tail_bound) +
                                 " above tolerance");
    return out;
}

std::complex<double> huniv_fourier(double r, double beta, double arg_x, double rho_x, double arg_w, int kmax)
{
    check_r(r);
    const double len = -std::log(r);
    const double u = -std::log(rho_x);
    const double b = beta / kTwoPi;
    std::complex<double> s = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        const double x = b - k;
        s += std::polar(cosh_ratio(x, len, u), x * (arg_x - arg_w));
    }
    return s / kTwoPi;
}

SeriesResult annulus_det_series(const MarkedAnnulus& marked, double b, int half_width)
{
    marked.validate();
    const int n = static_cast<int>(marked.inner_args.size());
    const double len = -std::log(marked.r);
    const int center = static_cast<int>(std::lround(b));
    const bool automatic = half_width == 0;
    int h = automatic ? std::max(n + 4, static_cast<int>(std::ceil(10.0 / len))) : half_width;
    if (2 * h + 1 < n)
        throw std::invalid_argument("annulus_det_series: window narrower than n");

    for (;;) {
        const int lo = center - h, hi = center + h;
        const int width = hi - lo + 1;
        std::vector<Eigen::VectorXcd> xrow(width), vrow(width);
        std::vector<double> weight(width);
        for (int t = 0; t < width; ++t) {
            const double e = b - (lo + t);
            xrow[t].resize(n);
            vrow[t].resize(n);
            for (int j = 0; j < n; ++j) {
                xrow[t][j] = std::polar(1.0, e * marked.inner_args[j]);
                vrow[t][j] = std::polar(1.0, -e * marked.outer_args[j]);
            }
            weight[t] = sech(len * e);
        }
        std::complex<double> total = 0.0;
        double edge = 0.0;
        std::vector<int> idx(n);
        for (int j = 0; j < n; ++j)
            idx[j] = j;
        Eigen::MatrixXcd a(n, n), v(n, n);
        for (;;) {
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                a.row(i) = xrow[idx[i]].transpose();
                v.row(i) = vrow[idx[i]].transpose();
                w *= weight[idx[i]];
            }
            const std::complex<double> term = w * a.determinant() * v.determinant();
            total += term;
            if (idx.front() == 0 || idx.back() == width - 1)
                edge += std::abs(term);
            int i = n - 1;
            while (i >= 0 && idx[i] == width - n + i)
                --i;
            if (i < 0)
                break;
            ++idx[i];
            for (int j = i + 1; j < n; ++j)
                idx[j] = idx[j - 1] + 1;
        }
        total /= std::pow(kTwoPi, n);
        edge /= std::pow(kTwoPi, n);
        const double ratio = edge / std::abs(total);
        if (ratio <= 1e-13 || !automatic) {
            if (!automatic && !(ratio <= 1e-10))
                throw std::runtime_error("annulus_det_series: k window too small (edge terms not negligible)");
            return {total, center, h, ratio};
        }
        h += 2;
        if (h > 400)
            throw std::runtime_error("annulus_det_series: window did not converge");
    }
}

double odd_loop_log_ratio(double rho)
{
    if (!(rho > 1.0))
        throw std::invalid_argument("odd_loop_log_ratio: rho must exceed 1");
    const double len = std::log(rho);
    double s = 0.25 * len - std::log(2.0);
    for (int j = 1; j * len < 60.0; ++j)
        s += (j % 2 == 1 ? 2.0 : -2.0) * std::log1p(std::exp(-j * len));
    return s;
}

CoeNormalization coe_normalization(int n)
{
    if (n < 1)
        throw std::invalid_argument("coe_normalization: n must be positive");
    static std::mutex mutex;
    static std::map<int, CoeNormalization> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(n); it != cache.end())
        return it->second;

    CoeNormalization z;
    if (n == 1) {
        z.value = kTwoPi;
    } else if (n <= 4) {
        // 2pi times the integral over gaps s_1..s_{n-1} > 0 with sum < 2pi.
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        std::vector<double> pos(n, 0.0);
        auto integrand = [&]() {
            double p = 1.0;
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    p *= 2.0 * std::sin(0.5 * (pos[k] - pos[j]));
            return p;
        };
        double err_total = 0.0;
        std::function<double(int)> level = [&](int d) -> double {
            const double start = pos[d - 1];
            double err = 0.0;
            double val = GK::integrate(
                [&](double s) {
                    pos[d] = start + s;
                    return d == n - 1 ? integrand() : level(d + 1);
                },
                0.0, kTwoPi - start, 8, 1e-12, &err);
            if (d == 1)
                err_total = err;
            return val;
        };
        z.value = kTwoPi * level(1);
        z.error = kTwoPi * err_total;
    } else {
        // Monte Carlo over the torus: the sector integral is the torus
        // integral divided by (n-1)!.
        Rng rng(0xC0E0000ULL + n);
        std::uniform_real_distribution<double> u(0.0, kTwoPi);
        const int samples = 2'000'000;
        std::vector<double> vals(samples);
        std::vector<double> th(n);
        for (int s = 0; s < samples; ++s) {
            for (auto& t : th)
                t = u(rng);
            double p = 1.0;
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    p *= 2.0 * std::abs(std::sin(0.5 * (th[k] - th[j])));
            vals[s] = p;
        }
        auto m = mean_se(vals);
        const double scale = std::pow(kTwoPi, n) / std::tgamma(n);
        z.value = m.mean * scale;
        z.error = m.se * scale;
    }
    cache[n] = z;
    return z;
}

double coe_density(const std::vector<double>& thetas)
{
    const int n = static_cast<int>(thetas.size());
    if (n < 1)
        throw std::invalid_argument("coe_density: empty tuple");
    for (int j = 0; j + 1 < n; ++j)
        if (!(thetas[j + 1] > thetas[j]))
            return 0.0;
    if (!(thetas.back() < thetas.front() + kTwoPi))
        return 0.0;
    double p = 1.0;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            p *= 2.0 * std::sin(0.5 * (thetas[k] - thetas[j]));
    return p / coe_normalization(n).value;
}

std::vector<double> coe_sample(int n, Rng& rng)
{
    if (n < 1 || n > 8)
        throw std::invalid_argument("coe_sample: n must be in [1, 8]");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // |Vandermonde| <= n^{n/2} by Hadamard's inequality.
    const double envelope = std::pow(double(n), 0.5 * n);
    std::vector<double> th(n);
    for (;;) {
        for (auto& t : th)
            t = kTwoPi * u(rng);
        double p = 1.0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                p *= 2.0 * std::abs(std::sin(0.5 * (th[k] - th[j])));
        if (u(rng) * envelope < p)
            break;
    }
    std::sort(th.begin(), th.end());
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int start = pick(rng);
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        const int src = (start + j) % n;
        out[j] = th[src] + (src < start ? kTwoPi : 0.0);
    }
    return out;
}

double coe_gap_cdf_n2(double s)
{
    if (s <= 0.0)
        return 0.0;
    if (s >= kTwoPi)
        return 1.0;
    return 0.5 * (1.0 - std::cos(0.5 * s));
}

std::vector<double> ccw_gaps(const std::vector<double>& thetas)
{
    const std::size_t n = thetas.size();
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = wrap_2pi(thetas[(j + 1) % n] - thetas[j]);
        if (n == 1 || d == 0.0)
            d = kTwoPi;
        g[j] = d;
    }
    return g;
}

double disc_green(std::complex<double> z, std::complex<double> w)
{
    if (!(std::abs(z) < 1.0 && std::abs(w) < 1.0))
        throw std::invalid_argument("disc_green: points must lie in the open disc");
    if (z == w)
        throw std::invalid_argument("disc_green: coincident points");
    return -std::log(std::abs((z - w) / (1.0 - std::conj(z) * w)));
}

double frak_h_lifted(const std::vector<double>& thetas, double kappa, std::complex<double> w)
{
    if (!(kappa > 0.0))
        throw std::invalid_argument("frak_h: kappa must be positive");
    if (!(std::abs(w) < 1.0))
        throw std::invalid_argument("frak_h: w must lie in the open disc");
    double s = 0.0;
    for (double t : thetas) {
        const std::complex<double> a = 1.0 - w * std::polar(1.0, -t);
        if (std::abs(a) < 1e-14)
            throw std::invalid_argument("frak_h: w coincides with a marked point");
        s += t + 2.0 * std::arg(a);
    }
    return -s / std::sqrt(kappa);
}

double frak_h(const std::vector<double>& thetas, double kappa, std::complex<double> w)
{
    std::vector<double> red(thetas.size());
    for (std::size_t j = 0; j < thetas.size(); ++j)
        red[j] = reduce_pm_pi(thetas[j]);
    return frak_h_lifted(red, kappa, w);
}

GofResult hitting_gof_test(const std::vector<std::vector<double>>& angle_samples, int n, std::uint64_t seed,
                           std::size_t reference_size)
{
    if (n < 2)
        throw std::invalid_argument("hitting_gof_test: n must be at least 2");
    if (angle_samples.size() < 500)
        throw std::invalid_argument("hitting_gof_test: need at least 500 samples");
    // First ccw gap of each labelled tuple; rotation invariant.
    std::vector<double> gaps;
    gaps.reserve(angle_samples.size());
    for (const auto& s : angle_samples) {
        if (static_cast<int>(s.size()) != n)
            throw std::invalid_argument("hitting_gof_test: tuple of the wrong size");
        gaps.push_back(ccw_gaps(s)[0]);
    }
    GofResult out;
    out.samples = gaps.size();
    if (n == 2) {
        out.statistic = ks_statistic(gaps, coe_gap_cdf_n2);
        out.critical = ks_critical_1pct(gaps.size());
    } else {
        Rng rng = make_stream(seed, 0);
        std::vector<double> ref(reference_size);
        for (auto& g : ref)
            g = ccw_gaps(coe_sample(n, rng))[0];
        out.statistic = ks_two_sample(gaps, ref);
        out.critical = ks_critical_1pct(gaps.size(), ref.size());
    }
    out.pass = out.statistic < out.critical;
    return out;
}

} // namespace windlab
