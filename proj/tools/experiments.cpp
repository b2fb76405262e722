#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>

#include "windlab/continuum.hpp"
#include "windlab/harmonic.hpp"
#include "windlab/lattice.hpp"
#include "windlab/loopsoup.hpp"
#include "windlab/parallel.hpp"
#include "windlab/sde.hpp"
#include "windlab/stats.hpp"
#include "windlab/wilson.hpp"

namespace windlab::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kStreams = 16;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "' in " + where);
    }
}

AnnularLattice build_lattice(const Config& c)
{
    if (c.domain.shape == "square")
        return AnnularLattice::square(static_cast<int>(c.domain.outer_radius), static_cast<int>(c.domain.inner_radius));
    return AnnularLattice::disc(c.domain.outer_radius, c.domain.inner_radius);
}

double vertex_arg(const AnnularLattice& lat, int v)
{
    const auto p = lat.point(v);
    return std::atan2(double(p.y), double(p.x));
}

double angle_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}

// Boundary vertices whose arguments are closest to the requested angles.
std::vector<int> nearest_vertices(const AnnularLattice& lat, const std::vector<int>& pool,
                                  const std::vector<double>& angles, const char* what)
{
    std::vector<int> out;
    for (double a : angles) {
        int best = -1;
        double bd = INFINITY;
        for (int v : pool) {
            const double d = angle_distance(vertex_arg(lat, v), a);
            if (d < bd) {
                bd = d;
                best = v;
            }
        }
        if (best < 0)
            throw ConfigError(std::string("no ") + what + " boundary vertex available");
        if (std::find(out.begin(), out.end(), best) != out.end())
            throw ConfigError(std::string(what) + " angles map to the same vertex");
        out.push_back(best);
    }
    return out;
}

std::vector<int> reachable_outer(const AnnularLattice& lat)
{
    std::vector<int> out;
    for (int v : lat.outer_boundary())
        for (int w : lat.neighbors(v))
            if (!lat.is_outer(w)) {
                out.push_back(v);
                break;
            }
    return out;
}

std::vector<std::vector<int>> subsets(const std::vector<int>& items, int k)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < items.size(); ++i) {
            cur.push_back(items[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

ExperimentResult verify_fomin(const Config& c)
{
    const auto lat = build_lattice(c);
    if (lat.free_count() > kEnumerationCap)
        throw ConfigError("verify-fomin needs at most 16 non-absorbed vertices");
    const auto zip = Zipper::default_ray(lat);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "n", "config", "beta", "exact_re", "exact_im", "brute_re", "brute_im",
                         "abs_diff", "prob_exact", "prob_brute"};
    const std::vector<double> betas = {0.0, 0.7, kPi / 3.0, kPi};
    std::vector<int> ns = {c.run.n};
    if (c.run.n == 0)
        ns = {1, 2, 3};
    double worst = 0.0, worst_p = 0.0;
    std::int64_t configs = 0;
    for (int n : ns)
        for (const auto& xs : subsets(lat.inner_boundary(), n))
            for (const auto& vs : subsets(reachable_outer(lat), n)) {
                try {
                    brute_force_winding_cf(lat, zip, 0.0, xs, vs);
                } catch (const std::domain_error&) {
                    // impossible configuration: the exact probability must vanish too
                    try {
                        worst_p = std::max(worst_p, std::abs(winding_cf_exact(lat, zip, 0.0, xs, vs).event_probability));
                    } catch (const std::domain_error&) {
                    }
                    continue;
                }
                for (double b : betas) {
                    const auto ex = winding_cf_exact(lat, zip, b, xs, vs);
                    const auto bf = brute_force_winding_cf(lat, zip, b, xs, vs);
                    const double d = std::abs(ex.cf - bf.cf);
                    worst = std::max(worst, d);
                    worst_p = std::max(worst_p, std::abs(ex.event_probability - bf.event_probability));
                    res.table.rows.push_back({i64(c.run.seed), std::int64_t(-1), std::int64_t(n), configs, b,
                                              ex.cf.real(), ex.cf.imag(), bf.cf.real(), bf.cf.imag(), d,
                                              ex.event_probability, bf.event_probability});
                }
                ++configs;
            }
    res.summary = {{"configurations", configs}, {"max_abs_diff", worst}, {"max_prob_diff", worst_p},
                   {"tolerance", c.run.tolerance}, {"spanning_trees", matrix_tree_count(lat)}};
    res.ok = worst <= c.run.tolerance && worst_p <= c.run.tolerance;
    if (!res.ok)
        res.failure = "exact and brute-force values differ beyond tolerance";
    return res;
}

ExperimentResult winding_cf(const Config& c)
{
    const auto lat = build_lattice(c);
    const auto zip = Zipper::default_ray(lat);
    const auto xs = nearest_vertices(lat, lat.inner_boundary(), c.marked.inner_angles, "inner");
    const auto vs = nearest_vertices(lat, reachable_outer(lat), c.marked.outer_angles, "outer");
    const auto ex = winding_cf_exact(lat, zip, c.run.beta, xs, vs);
    const auto mc = winding_cf_mc(lat, zip, c.run.beta, xs, vs, c.run.samples, c.run.seed);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "n", "beta", "mc_re", "mc_im", "mc_se_re", "mc_se_im", "exact_re",
                         "exact_im", "event_probability", "accepted", "attempts"};
    res.table.rows.push_back({i64(c.run.seed), std::int64_t(-1), std::int64_t(xs.size()), c.run.beta,
                              mc.estimate.real(), mc.estimate.imag(), mc.se_re, mc.se_im, ex.cf.real(), ex.cf.imag(),
                              ex.event_probability, i64(mc.accepted), i64(mc.attempts)});
    const double z = std::max(std::abs(mc.estimate.real() - ex.cf.real()) / std::max(mc.se_re, 1e-300),
                              std::abs(mc.estimate.imag() - ex.cf.imag()) / std::max(mc.se_im, 1e-300));
    res.summary = {{"max_z_score", z}};
    return res;
}

ExperimentResult hitting_stats(const Config& c)
{
    const auto lat = build_lattice(c);
    const int n = static_cast<int>(c.marked.inner_angles.size());
    const auto xs = nearest_vertices(lat, lat.inner_boundary(), c.marked.inner_angles, "inner");
    const std::uint64_t total = c.run.samples;
    std::vector<std::vector<double>> angles(total);
    std::vector<std::uint64_t> attempts(kStreams, 0);
    parallel_for(kStreams, [&](std::size_t s) {
        Rng rng = make_stream(c.run.seed, s);
        BranchSampler sampler(lat);
        BranchTuple tuple;
        for (std::size_t i = chunk_begin(total, kStreams, s); i < chunk_begin(total, kStreams, s + 1); ++i) {
            for (;;) {
                ++attempts[s];
                if (sampler.attempt(xs, rng, tuple))
                    break;
            }
            for (const auto& b : tuple.branches)
                angles[i].push_back(vertex_arg(lat, b.back()));
        }
    });
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "sample"};
    for (int j = 0; j < n; ++j)
        res.table.columns.push_back("angle_" + std::to_string(j + 1));
    res.table.columns.push_back("first_gap");
    for (std::size_t s = 0; s < kStreams; ++s)
        for (std::size_t i = chunk_begin(total, kStreams, s); i < chunk_begin(total, kStreams, s + 1); ++i) {
            std::vector<Cell> row = {i64(c.run.seed), std::int64_t(s), std::int64_t(i)};
            for (double a : angles[i])
                row.push_back(a);
            row.push_back(ccw_gaps(angles[i])[0]);
            res.table.rows.push_back(row);
        }
    std::uint64_t att = 0;
    for (auto a : attempts)
        att += a;
    res.summary = {{"accepted", total}, {"attempts", att}};
    if (n >= 2 && total >= 500) {
        const auto g = hitting_gof_test(angles, n, c.run.seed);
        res.summary["ks"] = g.statistic;
        res.summary["ks_critical_1pct"] = g.critical;
        res.summary["ks_pass"] = g.pass;
    }
    return res;
}

ExperimentResult loop_soup(const Config& c)
{
    const auto lat = build_lattice(c);
    const auto zip = Zipper::default_ray(lat);
    const double eps = 1e-6;
    const int max_len = loop_length_for_tolerance(lat, eps);
    LoopSoupSampler sampler(lat, zip, max_len, eps);
    const auto soups = sample_soup_summaries(sampler, c.run.samples, c.run.seed, 0);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "soup", "loops", "odd_loops", "total_winding"};
    for (std::size_t s = 0; s < kStreams; ++s)
        for (std::size_t i = chunk_begin(soups.size(), kStreams, s); i < chunk_begin(soups.size(), kStreams, s + 1);
             ++i)
            res.table.rows.push_back({i64(c.run.seed), std::int64_t(s), std::int64_t(i), soups[i].count,
                                      soups[i].odd_count, soups[i].total_winding});
    const auto est = campbell_cf_mc(soups, c.run.beta);
    std::vector<double> odd(soups.size());
    for (std::size_t i = 0; i < soups.size(); ++i)
        odd[i] = double(soups[i].odd_count);
    res.summary = {{"max_len", max_len},
                   {"tail_bound", sampler.tail_bound()},
                   {"expected_loops", sampler.expected_count()},
                   {"campbell_mc_re", est.estimate.real()},
                   {"campbell_mc_im", est.estimate.imag()},
                   {"campbell_se_re", est.se_re},
                   {"campbell_se_im", est.se_im},
                   {"loop_mass_ratio_exact", loop_mass_ratio(lat, zip, c.run.beta, 0.0)},
                   {"mean_odd_loops", mean_se(odd).mean},
                   {"half_log_lmr_0_pi", 0.5 * std::log(loop_mass_ratio(lat, zip, 0.0, kPi))}};
    return res;
}

ExperimentResult exponents(const Config& c)
{
    const int n = c.marked.inner_angles.empty() ? c.run.n : static_cast<int>(c.marked.inner_angles.size());
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "n", "beta", "r", "abs_value", "half_width", "edge_ratio"};
    std::vector<double> lx, ly;
    for (double r : {1e-2, 1e-3, 1e-4}) {
        MarkedAnnulus m;
        m.r = r;
        if (!c.marked.inner_angles.empty()) {
            m.inner_args = c.marked.inner_angles;
            m.outer_args = c.marked.outer_angles;
        } else {
            for (int j = 0; j < n; ++j) {
                m.inner_args.push_back(2.0 * kPi * j / n + 1.0 / n);
                m.outer_args.push_back(2.0 * kPi * j / n);
            }
        }
        const auto s = annulus_det_series(m, c.run.beta / (2.0 * kPi));
        lx.push_back(std::log(r));
        ly.push_back(std::log(std::abs(s.value)));
        res.table.rows.push_back({i64(c.run.seed), std::int64_t(-1), std::int64_t(n), c.run.beta, r,
                                  std::abs(s.value), std::int64_t(s.half_width), s.boundary_ratio});
    }
    res.summary = {{"fitted_exponent", least_squares_line(lx, ly).slope}};
    return res;
}

std::vector<double> equally_spaced(int n)
{
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j)
        t[j] = 2.0 * kPi * j / n;
    return t;
}

int stride_for(double t_end, double dt, int points)
{
    const double steps = std::ceil(t_end / dt - 1e-9);
    return std::max(1, static_cast<int>(std::ceil(steps / points)));
}

ExperimentResult dbm(const Config& c)
{
    const int n = c.run.n;
    const std::uint64_t paths = c.run.samples;
    const int stride = stride_for(c.run.t_end, c.run.dt, 1000);
    std::vector<DysonPath> out(paths);
    parallel_for(kStreams, [&](std::size_t s) {
        Rng rng = make_stream(c.run.seed, s);
        for (std::size_t p = chunk_begin(paths, kStreams, s); p < chunk_begin(paths, kStreams, s + 1); ++p)
            out[p] = dbm_with_coe_start(n, c.run.kappa, c.run.t_end, c.run.dt, rng, stride);
    });
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "path", "time"};
    for (int j = 0; j < n; ++j)
        res.table.columns.push_back("theta_" + std::to_string(j + 1));
    for (std::size_t s = 0; s < kStreams; ++s)
        for (std::size_t p = chunk_begin(paths, kStreams, s); p < chunk_begin(paths, kStreams, s + 1); ++p)
            for (std::size_t k = 0; k < out[p].times.size(); ++k) {
                std::vector<Cell> row = {i64(c.run.seed), std::int64_t(s), std::int64_t(p), out[p].times[k]};
                for (double v : out[p].thetas[k])
                    row.push_back(v);
                res.table.rows.push_back(row);
            }
    res.summary = {{"paths", paths}, {"record_stride", stride}};
    return res;
}

ExperimentResult winding_variance(const Config& c)
{
    const auto w = sle_winding_experiment(c.run.n, c.run.kappa, c.run.t_end, c.run.samples, c.run.seed, c.run.dt);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "path"};
    for (int j = 0; j < c.run.n; ++j)
        res.table.columns.push_back("normalized_" + std::to_string(j + 1));
    const std::size_t paths = w.normalized.size();
    for (std::size_t s = 0; s < kStreams; ++s)
        for (std::size_t p = chunk_begin(paths, kStreams, s); p < chunk_begin(paths, kStreams, s + 1); ++p) {
            std::vector<Cell> row = {i64(c.run.seed), std::int64_t(s), std::int64_t(p)};
            for (double v : w.normalized[p])
                row.push_back(v);
            res.table.rows.push_back(row);
        }
    res.summary = {{"covariance", w.covariance}, {"kappa_over_n", c.run.kappa / c.run.n}};
    return res;
}

ExperimentResult gff_check(const Config& c)
{
    const auto g = gff_martingale_check(c.run.kappa, c.run.n, {0.15, 0.05}, {-0.15, -0.05}, c.run.t_end, c.run.dt,
                                        c.run.samples, c.run.seed);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "mean_drift", "stderr_drift", "qv_empirical", "qv_hadamard",
                         "qv_mismatch", "stopped_paths", "max_lift_jump"};
    res.table.rows.push_back({i64(c.run.seed), std::int64_t(-1), g.mean_drift, g.stderr_drift, g.qv_empirical,
                              g.qv_hadamard, g.qv_mismatch, i64(g.stopped_paths), g.max_lift_jump});
    res.summary = {{"drift_z", std::abs(g.mean_drift) / g.stderr_drift}, {"qv_mismatch", g.qv_mismatch}};
    return res;
}

ExperimentResult trace(const Config& c)
{
    Rng rng = make_stream(c.run.seed, 0);
    const int stride = stride_for(c.run.t_end, c.run.dt, 200);
    const auto path = simulate_dbm(c.run.n, c.run.kappa, 2.0, equally_spaced(c.run.n), c.run.t_end, c.run.dt, rng,
                                   stride);
    const auto tr = trace_points(path, 1e-3);
    ExperimentResult res;
    res.table.columns = {"seed", "stream", "curve", "index", "time", "x", "y"};
    for (std::size_t j = 0; j < tr.size(); ++j)
        for (std::size_t k = 0; k < tr[j].size(); ++k)
            res.table.rows.push_back({i64(c.run.seed), std::int64_t(0), std::int64_t(j + 1), std::int64_t(k),
                                      path.times[k], tr[j][k].real(), tr[j][k].imag()});
    res.summary = {{"curves", tr.size()}, {"points_per_curve", path.times.size()}};
    return res;
}

} // namespace

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"verify-fomin", "winding-cf",       "hitting-stats",
                                                   "loop-soup",    "exponents",        "dbm",
                                                   "winding-variance", "gff-check",    "trace"};
    return names;
}

Config default_config(const std::string& experiment)
{
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment '" + experiment + "'");
    Config c;
    c.experiment = experiment;
    auto& d = c.domain;
    auto& r = c.run;
    if (experiment == "verify-fomin") {
        d = {"square", 2, 0};
        r.n = 0;
    } else if (experiment == "winding-cf") {
        d = {"square", 3, 0};
        c.marked = {{0.0}, {0.5}};
        r.samples = 20000;
        r.beta = 0.7;
    } else if (experiment == "hitting-stats") {
        d = {"disc", 60, 0};
        c.marked = {{0.0, kPi}, {}};
        r.samples = 5000;
        r.n = 2;
    } else if (experiment == "loop-soup") {
        d = {"square", 5, 0};
        r.samples = 10000;
        r.beta = kPi / 2;
    } else if (experiment == "exponents") {
        r.n = 3;
        r.beta = 0.0;
    } else if (experiment == "dbm") {
        r.n = 3;
        r.samples = 10;
    } else if (experiment == "winding-variance") {
        r.n = 3;
        r.t_end = 50.0;
    } else if (experiment == "gff-check") {
        r.n = 2;
        r.t_end = 0.3;
        r.dt = 1e-4;
    } else if (experiment == "trace") {
        r.n = 2;
        r.t_end = 0.5;
    }
    return c;
}

Config parse_config(const json& doc, const std::string& experiment)
{
    reject_unknown(doc, {"experiment", "domain", "marked", "run", "output"}, "config");
    std::string name = experiment;
    if (doc.contains("experiment")) {
        read(doc, "experiment", name, "config");
        if (!experiment.empty() && name != experiment)
            throw ConfigError("config is for experiment '" + name + "', not '" + experiment + "'");
    }
    if (name.empty())
        throw ConfigError("no experiment given");
    Config c = default_config(name);
    if (doc.contains("domain")) {
        const auto& d = doc["domain"];
        reject_unknown(d, {"shape", "outer_radius", "inner_radius"}, "domain");
        read(d, "shape", c.domain.shape, "domain");
        read(d, "outer_radius", c.domain.outer_radius, "domain");
        read(d, "inner_radius", c.domain.inner_radius, "domain");
    }
    if (doc.contains("marked")) {
        const auto& m = doc["marked"];
        reject_unknown(m, {"inner_angles", "outer_angles"}, "marked");
        read(m, "inner_angles", c.marked.inner_angles, "marked");
        read(m, "outer_angles", c.marked.outer_angles, "marked");
    }
    if (doc.contains("run")) {
        const auto& r = doc["run"];
        reject_unknown(r, {"seed", "samples", "dt", "t_end", "beta", "kappa", "n", "tolerance"}, "run");
        read(r, "seed", c.run.seed, "run");
        read(r, "samples", c.run.samples, "run");
        read(r, "dt", c.run.dt, "run");
        read(r, "t_end", c.run.t_end, "run");
        read(r, "beta", c.run.beta, "run");
        read(r, "kappa", c.run.kappa, "run");
        read(r, "n", c.run.n, "run");
        read(r, "tolerance", c.run.tolerance, "run");
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        reject_unknown(o, {"path", "format"}, "output");
        read(o, "path", c.output.path, "output");
        read(o, "format", c.output.format, "output");
    }
    return c;
}

void validate_config(const Config& c)
{
    const auto& d = c.domain;
    if (d.shape != "disc" && d.shape != "square")
        throw ConfigError("domain.shape must be 'disc' or 'square'");
    if (!(d.inner_radius >= 0.0) || !(d.outer_radius >= d.inner_radius + 2.0))
        throw ConfigError("domain radii must satisfy 0 <= inner_radius and inner_radius + 2 <= outer_radius");
    if (d.shape == "square" && (d.outer_radius != std::floor(d.outer_radius) || d.inner_radius != std::floor(d.inner_radius)))
        throw ConfigError("square domains need integer radii");
    if (c.marked.inner_angles.size() != c.marked.outer_angles.size() && c.experiment == "winding-cf")
        throw ConfigError("winding-cf needs as many outer angles as inner angles");
    if (c.experiment == "winding-cf" && c.marked.inner_angles.empty())
        throw ConfigError("winding-cf needs marked points");
    if (c.experiment == "hitting-stats" && c.marked.inner_angles.empty())
        throw ConfigError("hitting-stats needs inner angles");
    if (c.experiment == "exponents" && c.marked.inner_angles.size() != c.marked.outer_angles.size())
        throw ConfigError("exponents needs as many outer angles as inner angles");
    const auto& r = c.run;
    if (r.samples == 0)
        throw ConfigError("run.samples must be positive");
    if (!(r.dt > 0.0 && r.dt <= 1e-3))
        throw ConfigError("run.dt must lie in (0, 1e-3]");
    if (!(r.t_end > 0.0))
        throw ConfigError("run.t_end must be positive");
    if (!(r.kappa > 0.0))
        throw ConfigError("run.kappa must be positive");
    if (!std::isfinite(r.beta))
        throw ConfigError("run.beta must be finite");
    if (!(r.tolerance > 0.0))
        throw ConfigError("run.tolerance must be positive");
    const bool any_n = c.experiment == "verify-fomin";
    if (r.n < (any_n ? 0 : 1) || r.n > 8)
        throw ConfigError("run.n out of range");
    if (c.experiment == "winding-variance" && r.t_end < 20.0)
        throw ConfigError("winding-variance needs t_end >= 20");
    if (c.experiment == "winding-variance" && r.samples < 2)
        throw ConfigError("winding-variance needs at least two samples");
    if (c.experiment == "gff-check" && r.samples < 2)
        throw ConfigError("gff-check needs at least two samples");
    if (c.output.format != "csv" && c.output.format != "json")
        throw ConfigError("output.format must be 'csv' or 'json'");
}

json config_to_json(const Config& c)
{
    return {{"experiment", c.experiment},
            {"domain",
             {{"shape", c.domain.shape}, {"outer_radius", c.domain.outer_radius}, {"inner_radius", c.domain.inner_radius}}},
            {"marked", {{"inner_angles", c.marked.inner_angles}, {"outer_angles", c.marked.outer_angles}}},
            {"run",
             {{"seed", c.run.seed},
              {"samples", c.run.samples},
              {"dt", c.run.dt},
              {"t_end", c.run.t_end},
              {"beta", c.run.beta},
              {"kappa", c.run.kappa},
              {"n", c.run.n},
              {"tolerance", c.run.tolerance}}},
            {"output", {{"path", c.output.path}, {"format", c.output.format}}}};
}

std::string config_hash(const Config& c)
{
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentResult run_experiment(const Config& c)
{
    validate_config(c);
    const auto& e = c.experiment;
    if (e == "verify-fomin")
        return verify_fomin(c);
    if (e == "winding-cf")
        return winding_cf(c);
    if (e == "hitting-stats")
        return hitting_stats(c);
    if (e == "loop-soup")
        return loop_soup(c);
    if (e == "exponents")
        return exponents(c);
    if (e == "dbm")
        return dbm(c);
    if (e == "winding-variance")
        return winding_variance(c);
    if (e == "gff-check")
        return gff_check(c);
    if (e == "trace")
        return trace(c);
    throw ConfigError("unknown experiment '" + e + "'");
}

namespace {

std::string cell_text(const Cell& cell)
{
    if (auto p = std::get_if<std::int64_t>(&cell))
        return std::to_string(*p);
    if (auto p = std::get_if<double>(&cell)) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *p);
        return buf;
    }
    return std::get<std::string>(cell);
}

} // namespace

std::string table_to_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + cell_text(row[i]);
        out += '\n';
    }
    return out;
}

json table_to_json(const Table& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
        rows.push_back(obj);
    }
    return {{"columns", t.columns}, {"rows", rows}};
}

} // namespace windlab::cli
