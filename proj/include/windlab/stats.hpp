#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace windlab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

struct ComplexMeanSe {
    std::complex<double> mean;
    double se_re = 0.0;
    double se_im = 0.0;
    std::size_t count = 0;
};

ComplexMeanSe complex_mean_se(const std::vector<std::complex<double>>& zs);

// Sample variance with its standard error under a normal approximation
// (se = var * sqrt(2 / (N - 1))).
MeanSe variance_se(const std::vector<double>& xs);

// Kolmogorov-Smirnov distance of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic 1% critical values.
double ks_critical_1pct(std::size_t n);
double ks_critical_1pct(std::size_t n, std::size_t m);

// Upper tail probability of the chi-square distribution.
double chi_square_pvalue(double statistic, double dof);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace windlab
