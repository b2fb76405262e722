#include "windlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace windlab {

MeanSe mean_se(const std::vector<double>& xs)
{
    MeanSe out;
    out.count = xs.size();
    if (xs.empty())
        return out;
    double s = 0.0;
    for (double x : xs)
        s += x;
    out.mean = s / xs.size();
    if (xs.size() > 1) {
        double q = 0.0;
        for (double x : xs)
            q += (x - out.mean) * (x - out.mean);
        out.variance = q / (xs.size() - 1);
        out.se = std::sqrt(out.variance / xs.size());
    }
    return out;
}

ComplexMeanSe complex_mean_se(const std::vector<std::complex<double>>& zs)
{
    std::vector<double> re(zs.size()), im(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        re[i] = zs[i].real();
        im[i] = zs[i].imag();
    }
    MeanSe a = mean_se(re), b = mean_se(im);
    ComplexMeanSe out;
    out.mean = {a.mean, b.mean};
    out.se_re = a.se;
    out.se_im = b.se;
    out.count = zs.size();
    return out;
}

MeanSe variance_se(const std::vector<double>& xs)
{
    MeanSe m = mean_se(xs);
    MeanSe out;
    out.count = xs.size();
    out.mean = m.variance;
    out.se = xs.size() > 1 ? m.variance * std::sqrt(2.0 / (xs.size() - 1)) : 0.0;
    return out;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty())
        throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = a.size(), nb = b.size();
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_critical_1pct(std::size_t n)
{
    return 1.628 / std::sqrt(static_cast<double>(n));
}

double ks_critical_1pct(std::size_t n, std::size_t m)
{
    double a = n, b = m;
    return 1.628 * std::sqrt((a + b) / (a * b));
}

double chi_square_pvalue(double statistic, double dof)
{
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

} // namespace windlab
