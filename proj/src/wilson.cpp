#include "windlab/wilson.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "windlab/parallel.hpp"
#include "windlab/stats.hpp"

namespace windlab {

namespace {

inline int uniform_below(Rng& rng, int k)
{
    return static_cast<int>((static_cast<unsigned __int128>(rng()) * static_cast<unsigned>(k)) >> 64);
}

inline int random_neighbor(const AnnularLattice& lat, int u, Rng& rng)
{
    const auto& nb = lat.neighbors(u);
    return nb[uniform_below(rng, static_cast<int>(nb.size()))];
}

} // namespace

LatticePath random_walk(const AnnularLattice& lattice, int start, Rng& rng)
{
    LatticePath path{start};
    int u = start;
    while (!lattice.is_outer(u)) {
        u = random_neighbor(lattice, u, rng);
        path.push_back(u);
    }
    return path;
}

LatticePath loop_erase(const LatticePath& path)
{
    LatticePath out;
    std::unordered_map<int, std::size_t> where;
    for (int v : path) {
        auto it = where.find(v);
        if (it != where.end()) {
            for (std::size_t k = it->second + 1; k < out.size(); ++k)
                where.erase(out[k]);
            out.resize(it->second + 1);
        } else {
            where[v] = out.size();
            out.push_back(v);
        }
    }
    return out;
}

Arborescence wilson_ust(const AnnularLattice& lattice, Rng& rng, const std::vector<int>* order)
{
    const int n = lattice.size();
    Arborescence tree;
    tree.parent.assign(n, -1);
    std::vector<char> in_tree(n, 0);
    std::vector<int> next(n, -1);
    for (int v : lattice.outer_boundary())
        in_tree[v] = 1;
    auto grow = [&](int v) {
        int u = v;
        while (!in_tree[u]) {
            next[u] = random_neighbor(lattice, u, rng);
            u = next[u];
        }
        u = v;
        while (!in_tree[u]) {
            in_tree[u] = 1;
            tree.parent[u] = next[u];
            u = next[u];
        }
    };
    if (order) {
        for (int v : *order)
            grow(v);
    }
    for (int v = 0; v < n; ++v)
        grow(v);
    return tree;
}

bool is_arborescence(const AnnularLattice& lattice, const Arborescence& tree)
{
    const int n = lattice.size();
    if (static_cast<int>(tree.parent.size()) != n)
        return false;
    for (int v = 0; v < n; ++v) {
        if (lattice.is_outer(v)) {
            if (tree.parent[v] != -1)
                return false;
            continue;
        }
        const int p = tree.parent[v];
        if (p < 0 || lattice.direction_to(v, p) < 0)
            return false;
    }
    // Every vertex reaches the root within n steps.
    for (int v = 0; v < n; ++v) {
        int u = v, steps = 0;
        while (!lattice.is_outer(u)) {
            u = tree.parent[u];
            if (++steps > n)
                return false;
        }
    }
    return true;
}

LatticePath branch_from(const AnnularLattice& lattice, const Arborescence& tree, int v)
{
    LatticePath path{v};
    while (!lattice.is_outer(v)) {
        v = tree.parent[v];
        path.push_back(v);
    }
    return path;
}

BranchSampler::BranchSampler(const AnnularLattice& lattice)
    : lattice_(&lattice), next_(lattice.size(), -1), branch_stamp_(lattice.size(), 0)
{
}

bool BranchSampler::attempt(const std::vector<int>& xs, Rng& rng, BranchTuple& out)
{
    const auto& lat = *lattice_;
    if (++stamp_ == 0) {
        std::fill(branch_stamp_.begin(), branch_stamp_.end(), 0);
        stamp_ = 1;
    }
    out.branches.resize(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        // Walk until the outer boundary; touching an earlier branch first
        // means the tuple is not disjoint.
        int u = xs[j];
        while (!lat.is_outer(u)) {
            if (branch_stamp_[u] == stamp_)
                return false;
            next_[u] = random_neighbor(lat, u, rng);
            u = next_[u];
        }
        // Following last-exit pointers gives the loop erasure.
        auto& path = out.branches[j];
        path.clear();
        u = xs[j];
        path.push_back(u);
        while (!lat.is_outer(u)) {
            branch_stamp_[u] = stamp_;
            u = next_[u];
            path.push_back(u);
        }
    }
    return true;
}

ConditionedSample sample_conditioned_branches(const AnnularLattice& lattice, const std::vector<int>& xs, Rng& rng,
                                              std::uint64_t max_attempts)
{
    for (int x : xs)
        if (x < 0 || x >= lattice.size() || lattice.is_outer(x))
            throw std::invalid_argument("sample_conditioned_branches: start points must be non-absorbed vertices");
    BranchSampler sampler(lattice);
    ConditionedSample out;
    while (out.attempts < max_attempts) {
        ++out.attempts;
        if (sampler.attempt(xs, rng, out.tuple))
            return out;
    }
    throw AttemptsExhausted(out.attempts);
}

WindingMc winding_cf_mc(const AnnularLattice& lattice, const Zipper& zipper, double beta, const std::vector<int>& xs,
                        const std::optional<std::vector<int>>& vs, std::uint64_t samples, std::uint64_t seed,
                        std::uint64_t max_attempts)
{
    if (samples == 0)
        throw std::invalid_argument("winding_cf_mc: zero samples requested");
    std::vector<int> target;
    if (vs) {
        target = *vs;
        std::sort(target.begin(), target.end());
    }
    const std::size_t streams = std::min<std::uint64_t>(16, samples);
    std::vector<std::vector<std::complex<double>>> values(streams);
    std::vector<std::uint64_t> attempts(streams, 0);
    const std::uint64_t per_stream_cap = max_attempts / streams + 1;
    parallel_for(streams, [&](std::size_t s) {
        Rng rng = make_stream(seed, s);
        BranchSampler sampler(lattice);
        BranchTuple tuple;
        const std::uint64_t want = chunk_begin(samples, streams, s + 1) - chunk_begin(samples, streams, s);
        std::vector<int> ends(xs.size());
        while (values[s].size() < want) {
            if (attempts[s] >= per_stream_cap)
                break;
            ++attempts[s];
            if (!sampler.attempt(xs, rng, tuple))
                continue;
            if (vs) {
                for (std::size_t j = 0; j < xs.size(); ++j)
                    ends[j] = tuple.branches[j].back();
                std::sort(ends.begin(), ends.end());
                if (ends != target)
                    continue;
            }
            int k = 0;
            for (const auto& b : tuple.branches)
                k += crossing_number(zipper, b);
            values[s].push_back(std::polar(1.0, beta * k));
        }
    });
    std::vector<std::complex<double>> all;
    WindingMc out;
    for (std::size_t s = 0; s < streams; ++s) {
        all.insert(all.end(), values[s].begin(), values[s].end());
        out.attempts += attempts[s];
    }
    if (all.empty())
        throw std::runtime_error("winding_cf_mc: no accepted samples");
    auto m = complex_mean_se(all);
    out.estimate = m.mean;
    out.se_re = m.se_re;
    out.se_im = m.se_im;
    out.accepted = all.size();
    return out;
}

std::vector<Arborescence> enumerate_spanning_trees(const AnnularLattice& lattice)
{
    const int m = lattice.free_count();
    if (m > kEnumerationCap)
        throw std::invalid_argument("enumerate_spanning_trees: more than 16 non-root vertices");
    std::vector<Arborescence> trees;
    std::vector<int> parent(lattice.size(), -1);
    std::vector<char> assigned(lattice.size(), 0);

    auto closes_cycle = [&](int v) {
        int u = parent[v];
        while (!lattice.is_outer(u) && assigned[u]) {
            if (u == v)
                return true;
            u = parent[u];
        }
        return false;
    };
    auto recurse = [&](auto&& self, int i) -> void {
        if (i == m) {
            trees.push_back({parent});
            return;
        }
        const int v = lattice.free_vertex(i);
        for (int w : lattice.neighbors(v)) {
            parent[v] = w;
            assigned[v] = 1;
            if (!closes_cycle(v))
                self(self, i + 1);
            assigned[v] = 0;
            parent[v] = -1;
        }
    };
    recurse(recurse, 0);
    return trees;
}

long long matrix_tree_count(const AnnularLattice& lattice)
{
    const int m = lattice.free_count();
    if (m == 0)
        return 1;
    std::vector<std::vector<__int128>> a(m, std::vector<__int128>(m, 0));
    for (int i = 0; i < m; ++i) {
        const int v = lattice.free_vertex(i);
        a[i][i] = lattice.degree(v);
        for (int w : lattice.neighbors(v))
            if (!lattice.is_outer(w))
                a[i][lattice.free_index(w)] -= 1;
    }
    // Bareiss elimination: every division is exact.
    __int128 prev = 1;
    int sign = 1;
    for (int k = 0; k < m - 1; ++k) {
        if (a[k][k] == 0) {
            int p = k + 1;
            while (p < m && a[p][k] == 0)
                ++p;
            if (p == m)
                return 0;
            std::swap(a[k], a[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < m; ++i)
            for (int j = k + 1; j < m; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return static_cast<long long>(sign * a[m - 1][m - 1]);
}

BruteForceWinding brute_force_winding_cf(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                                         const std::vector<int>& xs_in, const std::vector<int>& vs_in)
{
    const auto xs = canonical_order(zipper, xs_in);
    const auto vs = canonical_order(zipper, vs_in);
    const std::size_t n = xs.size();
    if (n == 0 || vs.size() != n)
        throw std::invalid_argument("brute_force_winding_cf: need n inner and n outer points");
    const auto trees = enumerate_spanning_trees(lattice);
    BruteForceWinding out;
    out.tree_count = trees.size();
    out.k_probability.assign(n, 0.0);
    std::complex<double> acc = 0.0;
    std::size_t hits = 0;
    std::vector<int> owner(lattice.size(), -1);
    for (const auto& tree : trees) {
        std::fill(owner.begin(), owner.end(), -1);
        bool disjoint = true;
        int total_k = 0;
        std::vector<int> ends(n);
        for (std::size_t j = 0; j < n && disjoint; ++j) {
            auto path = branch_from(lattice, tree, xs[j]);
            for (int v : path) {
                if (lattice.is_outer(v))
                    continue;
                if (owner[v] >= 0) {
                    disjoint = false;
                    break;
                }
                owner[v] = static_cast<int>(j);
            }
            ends[j] = path.back();
            total_k += crossing_number(zipper, path);
        }
        if (!disjoint)
            continue;
        auto it = std::find(vs.begin(), vs.end(), ends[0]);
        if (it == vs.end())
            continue;
        const std::size_t k = it - vs.begin();
        bool matched = true;
        for (std::size_t j = 0; j < n; ++j)
            if (ends[j] != vs[(j + k) % n])
                matched = false;
        if (!matched) {
            // Endpoint set may still coincide with vs in a non-cyclic order;
            // planarity forbids that on an annulus.
            std::vector<int> a = ends, b = vs;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a == b)
                throw std::logic_error("brute_force_winding_cf: non-cyclic matching found");
            continue;
        }
        ++hits;
        out.k_probability[k] += 1.0;
        acc += std::polar(1.0, beta * total_k);
        if (n % 2 == 0 && ((total_k - static_cast<int>(k)) % 2 + 2) % 2 != 0)
            out.parity_holds = false;
    }
    if (hits == 0)
        throw std::domain_error("brute_force_winding_cf: conditioning event has zero mass");
    out.cf = acc / double(hits);
    out.event_probability = double(hits) / trees.size();
    for (double& p : out.k_probability)
        p /= trees.size();
    return out;
}

ChiSquareResult wilson_uniformity_test(const AnnularLattice& lattice, std::uint64_t samples, std::uint64_t seed)
{
    const auto trees = enumerate_spanning_trees(lattice);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < trees.size(); ++i)
        index[trees[i].parent] = i;
    const std::size_t streams = 16;
    std::vector<std::vector<std::uint64_t>> counts(streams, std::vector<std::uint64_t>(trees.size(), 0));
    parallel_for(streams, [&](std::size_t s) {
        Rng rng = make_stream(seed, s);
        const auto want = chunk_begin(samples, streams, s + 1) - chunk_begin(samples, streams, s);
        for (std::uint64_t i = 0; i < want; ++i) {
            auto t = wilson_ust(lattice, rng);
            auto it = index.find(t.parent);
            if (it == index.end())
                throw std::logic_error("wilson_ust produced a tree missing from the enumeration");
            ++counts[s][it->second];
        }
    });
    const double expected = double(samples) / trees.size();
    ChiSquareResult r;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        std::uint64_t c = 0;
        for (std::size_t s = 0; s < streams; ++s)
            c += counts[s][i];
        r.statistic += (c - expected) * (c - expected) / expected;
    }
    r.dof = double(trees.size()) - 1.0;
    r.p_value = chi_square_pvalue(r.statistic, r.dof);
    return r;
}

} // namespace windlab
