#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "windlab/lattice.hpp"
#include "windlab/rng.hpp"

namespace windlab {

// (Q_0^m)_{zz} for every non-absorbed z and 0 <= m <= max_len, with a bound
// on the rooted-loop mass beyond max_len.
struct ReturnWeights {
    int max_len = 0;
    Eigen::MatrixXd diag;      // diag(m, free index)
    double spectral_radius = 0.0;  // of Q_0
    double tail_bound = 0.0;   // >= sum_{m > max_len} sum_z (Q_0^m)_zz / m

    double at(int free_index, int m) const { return diag(m, free_index); }
};

ReturnWeights diagonal_return_weights(const AnnularLattice& lattice, int max_len);

// Tail bound N rho^{M+1} / ((M+1)(1 - rho)).
double loop_tail_bound(int free_count, double rho, int max_len);

// Smallest max_len whose tail bound is below epsilon.
int loop_length_for_tolerance(const AnnularLattice& lattice, double epsilon);

double spectral_radius_q0(const AnnularLattice& lattice);

struct RootedLoop {
    LatticePath vertices;  // closed: front() == back()
    int winding = 0;
    int length() const { return static_cast<int>(vertices.size()) - 1; }
    double lifetime(double mesh) const { return 0.5 * mesh * mesh * length(); }
};

struct LoopSoup {
    std::vector<RootedLoop> loops;
    int max_len = 0;
    double tail_bound = 0.0;
};

struct SoupSummary {
    std::int64_t count = 0;
    std::int64_t odd_count = 0;
    std::int64_t total_winding = 0;
    std::int64_t short_count = 0;  // loops with length <= the chosen m0
};

// Exact sampler of the truncated rooted-loop soup.  Holds the matrix power
// table used for bridge sampling; intended for small lattices.
class LoopSoupSampler {
public:
    LoopSoupSampler(const AnnularLattice& lattice, const Zipper& zipper, int max_len, double epsilon = 1e-6);

    LoopSoup sample(Rng& rng) const;
    SoupSummary sample_summary(Rng& rng, int m0) const;

    double expected_count() const { return total_mass_; }
    double expected_count_up_to(int m0) const;
    double tail_bound() const { return weights_.tail_bound; }
    int max_len() const { return weights_.max_len; }
    const ReturnWeights& weights() const { return weights_; }

private:
    template <class Visit>
    void draw(Rng& rng, Visit&& visit) const;

    const AnnularLattice* lattice_;
    const Zipper* zipper_;
    ReturnWeights weights_;
    std::vector<Eigen::MatrixXd> powers_;  // Q_0^k for k <= max_len
    std::vector<int> cell_vertex_, cell_length_;
    std::vector<double> cell_cdf_;
    double total_mass_ = 0.0;
};

LoopSoup sample_loop_soup(const AnnularLattice& lattice, const Zipper& zipper, Rng& rng, int max_len,
                          double epsilon = 1e-6);

SoupSummary summarize(const LoopSoup& soup, int m0);

struct CampbellEstimate {
    std::complex<double> estimate;
    double se_re = 0.0;
    double se_im = 0.0;
};

// Mean of exp(i beta * total winding) over the soups.
CampbellEstimate campbell_cf_mc(const std::vector<SoupSummary>& soups, double beta);
CampbellEstimate campbell_cf_mc(const std::vector<LoopSoup>& soups, double beta);

// Summaries of `count` independent soups, split over fixed streams.
std::vector<SoupSummary> sample_soup_summaries(const LoopSoupSampler& sampler, std::uint64_t count,
                                               std::uint64_t seed, int m0);

} // namespace windlab
