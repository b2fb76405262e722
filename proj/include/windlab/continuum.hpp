#pragma once

#include <complex>
#include <vector>

#include "windlab/rng.hpp"

namespace windlab {

// Annulus r < |z| < 1 with x_j on |z| = r and v_j on |z| = 1, given by their
// arguments in ccw order.
struct MarkedAnnulus {
    double r = 0.5;
    std::vector<double> inner_args;
    std::vector<double> outer_args;

    // sum arg x_j - sum arg v_j reduced to [-pi, pi)
    double c() const;
    void validate() const;
};

struct SleConstants {
    double kappa;
    double chi;
    double lambda;
    explicit SleConstants(double kappa);
};

// (1 / (2|log r|)) sech(pi (x2 - x1) / (2|log r|))
double strip_poisson_kernel(double r, double x1, double x2);

// Boundary Poisson kernel of the annulus cover: the point at argument
// theta and modulus rho (r <= rho < 1) reflected at |z| = r, hitting the
// outer circle at argument phi.  Abscissa along the cover is the argument.
double nd_kernel(double r, double theta, double rho, double phi);

struct HunivResult {
    std::complex<double> value;
    double tail_bound = 0.0;
    int truncation = 0;
};

// sum_{|m| <= M} e^{i m beta} H(x, w + 2 pi m); beta is the monodromy phase
// in radians.  Throws if the tail bound exceeds `tolerance`.
HunivResult huniv_beta(double r, double beta, double arg_x, double rho_x, double arg_w, int truncation,
                       double tolerance = 1e-12);

// Same quantity from the Fourier side, for b = beta / 2pi:
// (1/2pi) sum_k e^{i(b-k)(arg x - arg w)} cosh((b-k)(L + log rho)) / cosh((b-k) L).
std::complex<double> huniv_fourier(double r, double beta, double arg_x, double rho_x, double arg_w, int kmax);

struct SeriesResult {
    std::complex<double> value;
    int k_center = 0;
    int half_width = 0;
    double boundary_ratio = 0.0;  // |terms touching the window edge| / |value|
};

// (1/(2pi)^n) sum_{k_1 < ... < k_n} det(e^{i(b-k_i) arg x_j}) det(e^{-i(b-k_i) arg v_j})
//   prod sech(|log r| (b - k_i)),
// where b is the twist in turns (monodromy e^{2 pi i b}).  half_width = 0
// picks the window automatically and widens it until the edge terms are
// below 1e-13 of the value; an explicit half_width that is too small throws.
SeriesResult annulus_det_series(const MarkedAnnulus& marked, double b, int half_width = 0);

// Continuum value of log LMR(0, pi) = log det(I - Q_pi) - log det(I - Q_0)
// for the annulus 1/rho < |z| < 1 with reflecting inner circle, from the
// twisted cylinder spectrum with L = log rho:
//   L/4 - log 2 + 2 sum_{j odd} log(1 + e^{-jL}) - 2 sum_{k >= 1} log(1 + e^{-2kL}).
// Its slope in log rho tends to 1/4 only as rho -> infinity.
double odd_loop_log_ratio(double rho);

// Ordered sector: theta_1 in [0, 2pi), theta_1 < ... < theta_n < theta_1 + 2pi.
struct CoeNormalization {
    double value = 0.0;
    double error = 0.0;
};
CoeNormalization coe_normalization(int n);
double coe_density(const std::vector<double>& thetas);
std::vector<double> coe_sample(int n, Rng& rng);

// n = 2 gap law: density sin(s/2)/4 on (0, 2pi).
double coe_gap_cdf_n2(double s);

// Ccw gaps theta_{j+1} - theta_j (cyclic) of an angle tuple, each in (0, 2pi).
std::vector<double> ccw_gaps(const std::vector<double>& thetas);

double disc_green(std::complex<double> z, std::complex<double> w);

// -(1/sqrt kappa) sum_j [theta_j + 2 arg(1 - w e^{-i theta_j})]: the
// continuous branch of the Mobius argument in the disc.  frak_h first
// reduces theta_j to [-pi, pi); frak_h_lifted uses the angles as given.
double frak_h(const std::vector<double>& thetas, double kappa, std::complex<double> w);
double frak_h_lifted(const std::vector<double>& thetas, double kappa, std::complex<double> w);

struct GofResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool pass = false;
    std::size_t samples = 0;
};

// KS distance of the first ccw gap against COE.  n = 2 uses the exact gap
// CDF; n >= 3 compares with a coe_sample reference ensemble (two-sample
// KS).  Throws below 500 samples.
GofResult hitting_gof_test(const std::vector<std::vector<double>>& angle_samples, int n, std::uint64_t seed = 1,
                           std::size_t reference_size = 100000);

} // namespace windlab
