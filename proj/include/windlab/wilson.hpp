#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "windlab/lattice.hpp"
#include "windlab/rng.hpp"

namespace windlab {

// parent[v] is the next vertex toward the root; outer vertices hold -1
// because the whole outer boundary is the root.
struct Arborescence {
    std::vector<int> parent;
};

struct BranchTuple {
    std::vector<LatticePath> branches;  // branch j runs from x_j to the outer boundary
};

LatticePath random_walk(const AnnularLattice& lattice, int start, Rng& rng);

LatticePath loop_erase(const LatticePath& path);

// Wilson's algorithm on the wired graph.  `order` lists the non-root
// vertices in the order their walks are started (default: index order).
Arborescence wilson_ust(const AnnularLattice& lattice, Rng& rng, const std::vector<int>* order = nullptr);

bool is_arborescence(const AnnularLattice& lattice, const Arborescence& tree);

// Branch from v following parent pointers, ending at an outer vertex.
LatticePath branch_from(const AnnularLattice& lattice, const Arborescence& tree, int v);

class AttemptsExhausted : public std::runtime_error {
public:
    AttemptsExhausted(std::uint64_t attempts)
        : std::runtime_error("sample_conditioned_branches: max_attempts exhausted"), attempts_(attempts) {}
    std::uint64_t attempts() const { return attempts_; }

private:
    std::uint64_t attempts_;
};

struct ConditionedSample {
    BranchTuple tuple;
    std::uint64_t attempts = 0;
};

// Rejection sampler for the branches from xs given that they are pairwise
// disjoint away from the root.  Throws AttemptsExhausted.
ConditionedSample sample_conditioned_branches(const AnnularLattice& lattice, const std::vector<int>& xs, Rng& rng,
                                              std::uint64_t max_attempts = 10'000'000);

// Reusable form of the sampler that keeps its scratch buffers.
class BranchSampler {
public:
    explicit BranchSampler(const AnnularLattice& lattice);
    // One attempt; returns true and fills `out` on acceptance.
    bool attempt(const std::vector<int>& xs, Rng& rng, BranchTuple& out);

private:
    const AnnularLattice* lattice_;
    std::vector<int> next_;
    std::vector<std::uint32_t> branch_stamp_, walk_stamp_;
    std::uint32_t stamp_ = 0;
};

struct WindingMc {
    std::complex<double> estimate;
    double se_re = 0.0;
    double se_im = 0.0;
    std::uint64_t accepted = 0;   // tuples that entered the average
    std::uint64_t attempts = 0;
};

// Average of exp(i beta sum_j K_j) over conditioned tuples, keeping only
// tuples whose endpoint set equals vs when vs is given.  `samples` is the
// number of tuples that enter the average.
WindingMc winding_cf_mc(const AnnularLattice& lattice, const Zipper& zipper, double beta, const std::vector<int>& xs,
                        const std::optional<std::vector<int>>& vs, std::uint64_t samples, std::uint64_t seed,
                        std::uint64_t max_attempts = 10'000'000);

inline constexpr int kEnumerationCap = 16;

// Exhaustive list of arborescences of the wired graph (at most 16 non-root
// vertices).
std::vector<Arborescence> enumerate_spanning_trees(const AnnularLattice& lattice);

// Determinant of the reduced Laplacian by fraction-free elimination.
long long matrix_tree_count(const AnnularLattice& lattice);

struct BruteForceWinding {
    std::complex<double> cf;
    double event_probability = 0.0;      // P[E_{x,v}]
    std::vector<double> k_probability;   // P[E_{x,v,k}], k = 0..n-1
    bool parity_holds = true;            // sum_j K_j = k mod 2 on every tree in E_{x,v,k} (even n)
    std::size_t tree_count = 0;
};

// Labels follow canonical_order, so k counts the cyclic shift relative to
// the cut.
BruteForceWinding brute_force_winding_cf(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                                         const std::vector<int>& xs, const std::vector<int>& vs);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 0.0;
};

// Goodness of fit of `samples` Wilson trees against the uniform law on the
// enumerated list.
ChiSquareResult wilson_uniformity_test(const AnnularLattice& lattice, std::uint64_t samples, std::uint64_t seed);

} // namespace windlab
