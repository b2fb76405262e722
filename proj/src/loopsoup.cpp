#include "windlab/loopsoup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>

#include "windlab/parallel.hpp"
#include "windlab/stats.hpp"

namespace windlab {

namespace {

Eigen::SparseMatrix<double> q0_matrix(const AnnularLattice& lat)
{
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < lat.free_count(); ++i) {
        const int u = lat.free_vertex(i);
        for (int w : lat.neighbors(u))
            if (!lat.is_outer(w))
                trips.emplace_back(i, lat.free_index(w), 1.0 / lat.degree(u));
    }
    Eigen::SparseMatrix<double> q(lat.free_count(), lat.free_count());
    q.setFromTriplets(trips.begin(), trips.end());
    return q;
}

} // namespace

double spectral_radius_q0(const AnnularLattice& lat)
{
    // S = D^{1/2} Q D^{-1/2} is symmetric and nonnegative.  Power iteration
    // followed by the Collatz-Wielandt bound max_i (Sx)_i / x_i, which is a
    // rigorous upper bound for any positive x.
    const int n = lat.free_count();
    if (n == 0)
        return 0.0;
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < n; ++i) {
        const int u = lat.free_vertex(i);
        for (int w : lat.neighbors(u))
            if (!lat.is_outer(w))
                trips.emplace_back(i, lat.free_index(w), 1.0 / std::sqrt(double(lat.degree(u)) * lat.degree(w)));
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(trips.begin(), trips.end());
    // Iterate with (I + S) / 2 to avoid the period-2 oscillation of the
    // bipartite lattice; the Perron vector is the same.
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double upper = 1.0;
    for (int it = 0; it < 200000; ++it) {
        Eigen::VectorXd y = 0.5 * (x + s * x);
        y /= y.maxCoeff();
        x = y;
        if (it % 50 == 49) {
            Eigen::VectorXd sx = s * x;
            double lo = INFINITY, hi = 0.0;
            for (int i = 0; i < n; ++i) {
                double r = sx[i] / x[i];
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            upper = hi;
            if (hi - lo < 1e-9)
                break;
        }
    }
    return std::min(upper, 1.0);
}

double loop_tail_bound(int free_count, double rho, int max_len)
{
    if (rho >= 1.0)
        return INFINITY;
    return free_count * std::pow(rho, max_len + 1) / ((max_len + 1) * (1.0 - rho));
}

int loop_length_for_tolerance(const AnnularLattice& lattice, double epsilon)
{
    const double rho = spectral_radius_q0(lattice);
    int m = 2;
    while (loop_tail_bound(lattice.free_count(), rho, m) > epsilon) {
        m += 2;
        if (m > 1000000)
            throw std::runtime_error("loop_length_for_tolerance: spectral radius too close to 1");
    }
    return m;
}

ReturnWeights diagonal_return_weights(const AnnularLattice& lattice, int max_len)
{
    if (max_len < 2)
        throw std::invalid_argument("diagonal_return_weights: max_len must be at least 2");
    const int n = lattice.free_count();
    auto q = q0_matrix(lattice);
    ReturnWeights w;
    w.max_len = max_len;
    w.diag = Eigen::MatrixXd::Zero(max_len + 1, n);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    w.diag.row(0).setOnes();
    for (int m = 1; m <= max_len; ++m) {
        p = q * p;
        w.diag.row(m) = p.diagonal().transpose();
    }
    w.spectral_radius = spectral_radius_q0(lattice);
    w.tail_bound = loop_tail_bound(n, w.spectral_radius, max_len);
    return w;
}

LoopSoupSampler::LoopSoupSampler(const AnnularLattice& lattice, const Zipper& zipper, int max_len, double epsilon)
    : lattice_(&lattice), zipper_(&zipper)
{
    const int n = lattice.free_count();
    if (static_cast<double>(n) * n * (max_len + 1) > 2e8)
        throw std::invalid_argument("LoopSoupSampler: lattice too large for the cached power table");
    weights_ = diagonal_return_weights(lattice, max_len);
    if (!(weights_.tail_bound <= epsilon))
        throw std::runtime_error("LoopSoupSampler: truncation tail bound " + std::to_string(weights_.tail_bound) +
                                 " exceeds tolerance");
    auto q = q0_matrix(lattice);
    powers_.reserve(max_len + 1);
    powers_.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int k = 1; k <= max_len; ++k)
        powers_.push_back(q * powers_.back());
    double acc = 0.0;
    for (int m = 2; m <= max_len; ++m) {
        for (int i = 0; i < n; ++i) {
            const double mass = weights_.diag(m, i) / m;
            if (mass <= 0.0)
                continue;
            acc += mass;
            cell_vertex_.push_back(i);
            cell_length_.push_back(m);
            cell_cdf_.push_back(acc);
        }
    }
    total_mass_ = acc;
}

double LoopSoupSampler::expected_count_up_to(int m0) const
{
    double s = 0.0;
    for (int m = 2; m <= std::min(m0, weights_.max_len); ++m)
        s += weights_.diag.row(m).sum() / m;
    return s;
}

template <class Visit>
void LoopSoupSampler::draw(Rng& rng, Visit&& visit) const
{
    const auto& lat = *lattice_;
    std::poisson_distribution<long> count_dist(total_mass_);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long count = count_dist(rng);
    RootedLoop loop;
    for (long c = 0; c < count; ++c) {
        const double u = unif(rng) * total_mass_;
        auto it = std::upper_bound(cell_cdf_.begin(), cell_cdf_.end(), u);
        if (it == cell_cdf_.end())
            --it;
        const std::size_t cell = it - cell_cdf_.begin();
        const int z = cell_vertex_[cell];
        const int m = cell_length_[cell];
        const int root = lat.free_vertex(z);
        loop.vertices.assign(1, root);
        loop.winding = 0;
        int cur = root;
        for (int s = 0; s < m; ++s) {
            const int rem = m - s - 1;
            const auto& pw = powers_[rem];
            double weights[4];
            int cand[4];
            int k = 0;
            double total = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int w = lat.neighbor_slots(cur)[d];
                if (w < 0 || lat.is_outer(w))
                    continue;
                const double wt = pw(lat.free_index(w), z);
                if (wt <= 0.0)
                    continue;
                cand[k] = d;
                weights[k] = wt;
                total += wt;
                ++k;
            }
            double pick = unif(rng) * total;
            int choice = k - 1;
            for (int j = 0; j < k; ++j) {
                if (pick < weights[j]) {
                    choice = j;
                    break;
                }
                pick -= weights[j];
            }
            const int d = cand[choice];
            loop.winding += zipper_->sign_by_slot(cur, d);
            cur = lat.neighbor_slots(cur)[d];
            loop.vertices.push_back(cur);
        }
        visit(loop);
    }
}

LoopSoup LoopSoupSampler::sample(Rng& rng) const
{
    LoopSoup soup;
    soup.max_len = weights_.max_len;
    soup.tail_bound = weights_.tail_bound;
    draw(rng, [&](const RootedLoop& l) { soup.loops.push_back(l); });
    return soup;
}

SoupSummary LoopSoupSampler::sample_summary(Rng& rng, int m0) const
{
    SoupSummary s;
    draw(rng, [&](const RootedLoop& l) {
        ++s.count;
        if (l.winding % 2 != 0)
            ++s.odd_count;
        s.total_winding += l.winding;
        if (l.length() <= m0)
            ++s.short_count;
    });
    return s;
}

LoopSoup sample_loop_soup(const AnnularLattice& lattice, const Zipper& zipper, Rng& rng, int max_len, double epsilon)
{
    LoopSoupSampler sampler(lattice, zipper, max_len, epsilon);
    return sampler.sample(rng);
}

SoupSummary summarize(const LoopSoup& soup, int m0)
{
    SoupSummary s;
    for (const auto& l : soup.loops) {
        ++s.count;
        if (l.winding % 2 != 0)
            ++s.odd_count;
        s.total_winding += l.winding;
        if (l.length() <= m0)
            ++s.short_count;
    }
    return s;
}

CampbellEstimate campbell_cf_mc(const std::vector<SoupSummary>& soups, double beta)
{
    if (soups.empty())
        throw std::invalid_argument("campbell_cf_mc: empty sample");
    std::vector<std::complex<double>> z;
    z.reserve(soups.size());
    for (const auto& s : soups)
        z.push_back(std::polar(1.0, beta * double(s.total_winding)));
    auto m = complex_mean_se(z);
    return {m.mean, m.se_re, m.se_im};
}

CampbellEstimate campbell_cf_mc(const std::vector<LoopSoup>& soups, double beta)
{
    std::vector<SoupSummary> s;
    s.reserve(soups.size());
    for (const auto& soup : soups)
        s.push_back(summarize(soup, 0));
    return campbell_cf_mc(s, beta);
}

std::vector<SoupSummary> sample_soup_summaries(const LoopSoupSampler& sampler, std::uint64_t count,
                                               std::uint64_t seed, int m0)
{
    const std::size_t streams = 16;
    std::vector<SoupSummary> out(count);
    parallel_for(streams, [&](std::size_t s) {
        Rng rng = make_stream(seed, s);
        for (std::size_t i = chunk_begin(count, streams, s); i < chunk_begin(count, streams, s + 1); ++i)
            out[i] = sampler.sample_summary(rng, m0);
    });
    return out;
}

} // namespace windlab
