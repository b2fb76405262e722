#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "windlab/rng.hpp"

namespace windlab {

// Grid trajectory of n lifted circle angles.
struct DysonPath {
    std::vector<double> times;
    std::vector<std::vector<double>> thetas;  // thetas[k][j] at times[k]
    double kappa = 2.0;
    double drift = 2.0;
};

// dTheta_i = sqrt(kappa) dW_i + b sum_{j != i} cot((Theta_i - Theta_j)/2) dt
// by Euler-Maruyama.  Substeps are capped at (min gap)^2 / (8b), and a
// substep that would shrink a gap below a quarter of its size is split with
// a Brownian bridge.  Every record_every-th grid point is stored (plus the
// last one).  Throws if a gap collapses below 1e-9.
DysonPath simulate_dbm(int n, double kappa, double b, const std::vector<double>& thetas0, double t_end, double dt,
                       Rng& rng, int record_every = 1);

// COE initial angles, then simulate_dbm with b = 2.
DysonPath dbm_with_coe_start(int n, double kappa, double t_end, double dt, Rng& rng, int record_every = 1);

struct SleRhoPath {
    std::vector<double> times;
    std::vector<double> theta;
    std::vector<std::vector<double>> force;  // force[k][j], lifted so 0 < V_j - Theta < 2 pi
    double kappa = 2.0;
    std::vector<double> rhos;
};

// dTheta = sqrt(kappa) dW - sum_j (rho_j / 2) cot((V_j - Theta)/2) dt,
// dV_j = cot((V_j - Theta)/2) dt.  kappa = 0 gives the deterministic flow.
SleRhoPath sle_rho_driver(double kappa, const std::vector<double>& rhos, double theta0,
                          const std::vector<double>& force_args, double t_end, double dt, Rng& rng,
                          int record_every = 1);

struct LoewnerOptions {
    double step_factor = 0.05;   // substep <= step_factor * (distance to nearest driving point)^2
    double swallow_cutoff = 1e-5;
};

struct LoewnerFlow {
    std::vector<double> times;
    // Indexed [time][point].  arg_g is the continuous lift (NaN for z = 0).
    std::vector<std::vector<std::complex<double>>> g;
    std::vector<std::vector<std::complex<double>>> log_gprime;
    std::vector<std::vector<double>> arg_g;
    std::vector<double> swallow_time;  // +inf if never swallowed
};

// Radial Loewner flow dg = g sum_j (e^{i Theta_j} + g)/(e^{i Theta_j} - g) dt
// with drivers linearly interpolated between grid times.  Swallowed points
// keep their last value.
LoewnerFlow loewner_flow(const std::vector<double>& times, const std::vector<std::vector<double>>& drivers,
                         const std::vector<std::complex<double>>& points, const LoewnerOptions& options = {});
LoewnerFlow loewner_flow(const DysonPath& path, const std::vector<std::complex<double>>& points,
                         const LoewnerOptions& options = {});
LoewnerFlow loewner_flow(const SleRhoPath& path, const std::vector<std::complex<double>>& points,
                         const LoewnerOptions& options = {});

// For every stored time s, flow (1 - eps) e^{i Theta_j(s)} backward to time 0.
// Returns traces[j][k] for grid index k.
std::vector<std::vector<std::complex<double>>> trace_points(const std::vector<double>& times,
                                                            const std::vector<std::vector<double>>& drivers,
                                                            double eps = 1e-3, const LoewnerOptions& options = {});
std::vector<std::vector<std::complex<double>>> trace_points(const DysonPath& path, double eps = 1e-3,
                                                            const LoewnerOptions& options = {});

struct WindingExperiment {
    int n = 0;
    double kappa = 0.0;
    double t_end = 0.0;
    // (Theta_j(t) - Theta_j(0)) / sqrt(kappa t / n), one row per path.
    std::vector<std::vector<double>> normalized;
    std::vector<std::vector<double>> covariance;
};

// COE-started Dyson paths split over 16 fixed streams.
WindingExperiment sle_winding_experiment(int n, double kappa, double t_end, std::uint64_t paths, std::uint64_t seed,
                                         double dt = 1e-3);

std::vector<std::vector<double>> sample_covariance(const std::vector<std::vector<double>>& rows);

struct GffCheck {
    double mean_drift = 0.0;     // mean of H(t_end) - H(0) at z
    double stderr_drift = 0.0;
    double qv_empirical = 0.0;   // mean over paths of sum dh_z dh_w
    double qv_hadamard = 0.0;    // mean over paths of G(z,w) - G(g z, g w)
    double qv_mismatch = 0.0;    // |qv_empirical - qv_hadamard| / qv_hadamard
    std::uint64_t stopped_paths = 0;
    double max_lift_jump = 0.0;
};

// SLE_kappa(2,...,2) with n-1 force points started at equally spaced
// angles; H(t) = (chi + n/sqrt kappa) arg g_t(z) + h(g_t(z)) - chi arg g_t'(z).
// Paths are stopped at the first grid time a flowed point comes within 0.02
// of the circle.
GffCheck gff_martingale_check(double kappa, int n, std::complex<double> z, std::complex<double> w, double t_end,
                              double dt, std::uint64_t paths, std::uint64_t seed);

} // namespace windlab
