#include "windlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "windlab/continuum.hpp"
#include "windlab/parallel.hpp"
#include "windlab/stats.hpp"

namespace windlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCollapse = 1e-9;
constexpr int kMaxSplit = 60;

using cplx = std::complex<double>;

// Euler-Maruyama with Brownian-bridge refinement.  `noisy` marks the
// components driven by sigma dW; `gap` returns the smallest spacing (negative
// if the order is violated); `cap` maps that spacing to the largest allowed
// substep.
struct Integrator {
    std::size_t dim;
    std::vector<char> noisy;
    double sigma;
    std::function<void(const std::vector<double>&, std::vector<double>&)> drift;
    std::function<double(const std::vector<double>&)> gap;
    std::function<double(double)> cap;

    std::vector<std::vector<double>> scratch;

    void step(std::vector<double>& x, double h, const std::vector<double>& dw, Rng& rng,
              boost::random::normal_distribution<double>& normal, int depth)
    {
        if (depth > kMaxSplit)
            throw std::runtime_error("sde: step refinement did not converge");
        const double g0 = gap(x);
        if (!(g0 > kCollapse))
            throw std::runtime_error("sde: gap collapsed below 1e-9");
        bool split = h > cap(g0);
        std::vector<double> y;
        if (!split) {
            std::vector<double> b(dim);
            drift(x, b);
            y.resize(dim);
            for (std::size_t i = 0; i < dim; ++i)
                y[i] = x[i] + b[i] * h + (noisy[i] ? sigma * dw[i] : 0.0);
            split = gap(y) < 0.25 * g0;
        }
        if (!split) {
            x.swap(y);
            return;
        }
        std::vector<double> first(dim, 0.0), second(dim, 0.0);
        const double sd = 0.5 * std::sqrt(h);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!noisy[i])
                continue;
            first[i] = 0.5 * dw[i] + sd * normal(rng);
            second[i] = dw[i] - first[i];
        }
        step(x, 0.5 * h, first, rng, normal, depth + 1);
        step(x, 0.5 * h, second, rng, normal, depth + 1);
    }
};

double dyson_gap(const std::vector<double>& th)
{
    const std::size_t n = th.size();
    if (n < 2)
        return INFINITY;
    double g = th.front() + kTwoPi - th.back();
    for (std::size_t i = 0; i + 1 < n; ++i)
        g = std::min(g, th[i + 1] - th[i]);
    return g;
}

void dyson_drift(double b, const std::vector<double>& th, std::vector<double>& out)
{
    const std::size_t n = th.size();
    std::vector<double> s(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(0.5 * th[i]);
        c[i] = std::cos(0.5 * th[i]);
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            // cot((theta_i - theta_j) / 2) from half-angle products
            const double sn = s[i] * c[j] - c[i] * s[j];
            const double cs = c[i] * c[j] + s[i] * s[j];
            const double ct = cs / sn;
            out[i] += b * ct;
            out[j] -= b * ct;
        }
}

std::size_t grid_steps(double t_end, double dt)
{
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("t_end and dt must be positive");
    return static_cast<std::size_t>(std::llround(std::ceil(t_end / dt - 1e-9)));
}

} // namespace

DysonPath simulate_dbm(int n, double kappa, double b, const std::vector<double>& thetas0, double t_end, double dt,
                       Rng& rng, int record_every)
{
    if (n < 1 || static_cast<int>(thetas0.size()) != n)
        throw std::invalid_argument("simulate_dbm: need n initial angles");
    if (!(kappa >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("simulate_dbm: kappa and b must be nonnegative");
    if (dt > 1e-3 + 1e-15)
        throw std::invalid_argument("simulate_dbm: dt must be at most 1e-3");
    if (record_every < 1)
        throw std::invalid_argument("simulate_dbm: record_every must be positive");
    if (n > 1 && !(dyson_gap(thetas0) > 0.0))
        throw std::invalid_argument("simulate_dbm: initial angles must be strictly ccw within one turn");

    const std::size_t steps = grid_steps(t_end, dt);
    const double h = t_end / steps;
    Integrator in;
    in.dim = n;
    in.noisy.assign(n, 1);
    in.sigma = std::sqrt(kappa);
    in.drift = [b](const std::vector<double>& x, std::vector<double>& o) { dyson_drift(b, x, o); };
    in.gap = dyson_gap;
    in.cap = [b](double g) { return b > 0.0 ? g * g / (8.0 * b) : INFINITY; };

    DysonPath path;
    path.kappa = kappa;
    path.drift = b;
    std::vector<double> x = thetas0;
    path.times.push_back(0.0);
    path.thetas.push_back(x);
    boost::random::normal_distribution<double> normal;
    std::vector<double> dw(n);
    const double sq = std::sqrt(h);
    for (std::size_t k = 1; k <= steps; ++k) {
        for (auto& v : dw)
            v = sq * normal(rng);
        in.step(x, h, dw, rng, normal, 0);
        if (k % record_every == 0 || k == steps) {
            path.times.push_back(k * h);
            path.thetas.push_back(x);
        }
    }
    return path;
}

DysonPath dbm_with_coe_start(int n, double kappa, double t_end, double dt, Rng& rng, int record_every)
{
    auto start = coe_sample(n, rng);
    return simulate_dbm(n, kappa, 2.0, start, t_end, dt, rng, record_every);
}

SleRhoPath sle_rho_driver(double kappa, const std::vector<double>& rhos, double theta0,
                          const std::vector<double>& force_args, double t_end, double dt, Rng& rng, int record_every)
{
    if (rhos.size() != force_args.size())
        throw std::invalid_argument("sle_rho_driver: one weight per force point");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("sle_rho_driver: kappa must be nonnegative");
    if (record_every < 1)
        throw std::invalid_argument("sle_rho_driver: record_every must be positive");
    const std::size_t m = rhos.size();
    std::vector<double> x(m + 1);
    x[0] = theta0;
    for (std::size_t j = 0; j < m; ++j) {
        double d = std::fmod(force_args[j] - theta0, kTwoPi);
        if (d < 0)
            d += kTwoPi;
        if (!(d > kCollapse && d < kTwoPi - kCollapse))
            throw std::invalid_argument("sle_rho_driver: force point coincides with the driver");
        x[j + 1] = theta0 + d;
    }
    double rho_sum = 0.0;
    for (double r : rhos)
        rho_sum += std::abs(r);

    const std::size_t steps = grid_steps(t_end, dt);
    const double h = t_end / steps;
    Integrator in;
    in.dim = m + 1;
    in.noisy.assign(m + 1, 0);
    in.noisy[0] = 1;
    in.sigma = std::sqrt(kappa);
    in.drift = [&rhos, m](const std::vector<double>& s, std::vector<double>& o) {
        o[0] = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double ct = 1.0 / std::tan(0.5 * (s[j + 1] - s[0]));
            o[0] -= 0.5 * rhos[j] * ct;
            o[j + 1] = ct;
        }
    };
    in.gap = [m](const std::vector<double>& s) {
        double g = INFINITY;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = s[j + 1] - s[0];
            g = std::min({g, d, kTwoPi - d});
        }
        return g;
    };
    const double scale = std::max(1.0, 0.5 * rho_sum);
    in.cap = [scale](double g) { return g * g / (8.0 * scale); };

    SleRhoPath path;
    path.kappa = kappa;
    path.rhos = rhos;
    auto record = [&](double t) {
        path.times.push_back(t);
        path.theta.push_back(x[0]);
        path.force.emplace_back(x.begin() + 1, x.end());
    };
    record(0.0);
    boost::random::normal_distribution<double> normal;
    std::vector<double> dw(m + 1, 0.0);
    const double sq = std::sqrt(h);
    // kappa = 0 is an ODE; classical RK4 on capped substeps.
    auto rk4 = [&](double span) {
        const std::size_t d = m + 1;
        std::vector<double> k1(d), k2(d), k3(d), k4(d), y(d);
        double done = 0.0;
        while (done < span) {
            const double g = in.gap(x);
            if (!(g > kCollapse))
                throw std::runtime_error("sle_rho_driver: force point collided with the driver");
            const double sub = std::min(span - done, 0.25 * in.cap(g));
            auto shifted = [&](const std::vector<double>& k, double f) {
                for (std::size_t i = 0; i < d; ++i)
                    y[i] = x[i] + f * k[i];
                return y;
            };
            in.drift(x, k1);
            in.drift(shifted(k1, 0.5 * sub), k2);
            in.drift(shifted(k2, 0.5 * sub), k3);
            in.drift(shifted(k3, sub), k4);
            for (std::size_t i = 0; i < d; ++i)
                x[i] += sub / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            done += sub;
        }
    };
    for (std::size_t k = 1; k <= steps; ++k) {
        if (kappa > 0.0) {
            dw[0] = sq * normal(rng);
            in.step(x, h, dw, rng, normal, 0);
        } else {
            rk4(h);
        }
        if (k % record_every == 0 || k == steps)
            record(k * h);
    }
    return path;
}

namespace {

struct FlowState {
    cplx g, lg, ld;
};

// Loewner vector field at time t with drivers interpolated on [t0, t1].
struct Field {
    const std::vector<double>* a;
    const std::vector<double>* b;
    double t0, t1;
    bool has_log;

    void drivers(double t, std::vector<cplx>& e) const
    {
        const double s = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
        for (std::size_t j = 0; j < a->size(); ++j)
            e[j] = std::polar(1.0, (*a)[j] + s * ((*b)[j] - (*a)[j]));
    }

    FlowState eval(const FlowState& st, double t, std::vector<cplx>& e) const
    {
        drivers(t, e);
        cplx q = 0.0, dd = 0.0;
        for (const auto& ej : e) {
            const cplx den = ej - st.g;
            const cplx qj = (ej + st.g) / den;
            q += qj;
            dd += qj + 2.0 * ej * st.g / (den * den);
        }
        return {st.g * q, has_log ? q : cplx(0.0), dd};
    }

    double distance(const cplx& g, double t, std::vector<cplx>& e) const
    {
        drivers(t, e);
        double d = INFINITY;
        for (const auto& ej : e)
            d = std::min(d, std::abs(ej - g));
        return d;
    }
};

// Integrates from t0 to t1 (sign = +1) or backward (sign = -1).  Returns
// false if the point came within the cutoff; `when` then holds that time.
bool integrate(FlowState& st, const Field& f, double from, double to, const LoewnerOptions& opt, double& when)
{
    std::vector<cplx> e(f.a->size());
    const double dir = to >= from ? 1.0 : -1.0;
    double t = from;
    auto add = [](const FlowState& s, const FlowState& k, double h) {
        return FlowState{s.g + h * k.g, s.lg + h * k.lg, s.ld + h * k.ld};
    };
    while (dir * (to - t) > 0.0) {
        const double d = f.distance(st.g, t, e);
        if (d < opt.swallow_cutoff) {
            when = t;
            return false;
        }
        double h = std::min(std::abs(to - t), opt.step_factor * d * d);
        if (h < 1e-15)
            throw std::runtime_error("loewner_flow: step underflow");
        const double hs = dir * h;
        const FlowState k1 = f.eval(st, t, e);
        const FlowState k2 = f.eval(add(st, k1, 0.5 * hs), t + 0.5 * hs, e);
        const FlowState k3 = f.eval(add(st, k2, 0.5 * hs), t + 0.5 * hs, e);
        const FlowState k4 = f.eval(add(st, k3, hs), t + hs, e);
        st.g += hs / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
        st.lg += hs / 6.0 * (k1.lg + 2.0 * k2.lg + 2.0 * k3.lg + k4.lg);
        st.ld += hs / 6.0 * (k1.ld + 2.0 * k2.ld + 2.0 * k3.ld + k4.ld);
        t = (std::abs(to - t) <= h) ? to : t + hs;
    }
    return true;
}

} // namespace

LoewnerFlow loewner_flow(const std::vector<double>& times, const std::vector<std::vector<double>>& drivers,
                         const std::vector<cplx>& points, const LoewnerOptions& options)
{
    if (times.empty() || times.size() != drivers.size())
        throw std::invalid_argument("loewner_flow: one driver tuple per grid time");
    for (const auto& z : points)
        if (std::abs(z) > 1.0 + 1e-12)
            throw std::invalid_argument("loewner_flow: query point outside the closed disc");
    const std::size_t np = points.size();
    const std::size_t nt = times.size();
    LoewnerFlow out;
    out.times = times;
    out.g.assign(nt, std::vector<cplx>(np));
    out.log_gprime.assign(nt, std::vector<cplx>(np));
    out.arg_g.assign(nt, std::vector<double>(np));
    out.swallow_time.assign(np, std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < np; ++p) {
        const bool has_log = points[p] != cplx(0.0);
        FlowState st{points[p], has_log ? std::log(points[p]) : cplx(0.0), 0.0};
        bool alive = true;
        for (std::size_t k = 0; k < nt; ++k) {
            if (k > 0 && alive) {
                Field f{&drivers[k - 1], &drivers[k], times[k - 1], times[k], has_log};
                double when = 0.0;
                if (!integrate(st, f, times[k - 1], times[k], options, when)) {
                    alive = false;
                    out.swallow_time[p] = when;
                }
            }
            out.g[k][p] = st.g;
            out.log_gprime[k][p] = st.ld;
            out.arg_g[k][p] = has_log ? st.lg.imag() : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

LoewnerFlow loewner_flow(const DysonPath& path, const std::vector<cplx>& points, const LoewnerOptions& options)
{
    return loewner_flow(path.times, path.thetas, points, options);
}

LoewnerFlow loewner_flow(const SleRhoPath& path, const std::vector<cplx>& points, const LoewnerOptions& options)
{
    std::vector<std::vector<double>> d(path.theta.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = {path.theta[k]};
    return loewner_flow(path.times, d, points, options);
}

std::vector<std::vector<cplx>> trace_points(const std::vector<double>& times,
                                            const std::vector<std::vector<double>>& drivers, double eps,
                                            const LoewnerOptions& options)
{
    if (times.empty() || times.size() != drivers.size())
        throw std::invalid_argument("trace_points: one driver tuple per grid time");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("trace_points: eps must lie in (0, 1)");
    const std::size_t n = drivers.front().size();
    std::vector<std::vector<cplx>> traces(n, std::vector<cplx>(times.size()));
    LoewnerOptions opt = options;
    opt.swallow_cutoff = std::min(opt.swallow_cutoff, 0.01 * eps);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t s = 0; s < times.size(); ++s) {
            FlowState st{std::polar(1.0 - eps, drivers[s][j]), 0.0, 0.0};
            for (std::size_t k = s; k > 0; --k) {
                Field f{&drivers[k - 1], &drivers[k], times[k - 1], times[k], false};
                double when = 0.0;
                if (!integrate(st, f, times[k], times[k - 1], opt, when))
                    throw std::runtime_error("trace_points: backward flow hit a driving point");
            }
            traces[j][s] = st.g;
        }
    }
    return traces;
}

std::vector<std::vector<cplx>> trace_points(const DysonPath& path, double eps, const LoewnerOptions& options)
{
    return trace_points(path.times, path.thetas, eps, options);
}

std::vector<std::vector<double>> sample_covariance(const std::vector<std::vector<double>>& rows)
{
    if (rows.size() < 2)
        throw std::invalid_argument("sample_covariance: need at least two rows");
    const std::size_t d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            mean[i] += r[i];
    for (auto& m : mean)
        m /= rows.size();
    std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    for (auto& row : c)
        for (auto& v : row)
            v /= (rows.size() - 1);
    return c;
}

WindingExperiment sle_winding_experiment(int n, double kappa, double t_end, std::uint64_t paths, std::uint64_t seed,
                                         double dt)
{
    if (paths < 2)
        throw std::invalid_argument("sle_winding_experiment: need at least two paths");
    WindingExperiment out;
    out.n = n;
    out.kappa = kappa;
    out.t_end = t_end;
    out.normalized.assign(paths, std::vector<double>(n));
    const double norm = std::sqrt(kappa * t_end / n);
    const std::size_t streams = 16;
    const int stride = static_cast<int>(grid_steps(t_end, dt)) + 1;
    parallel_for(streams, [&](std::size_t s) {
        Rng rng = make_stream(seed, s);
        for (std::size_t p = chunk_begin(paths, streams, s); p < chunk_begin(paths, streams, s + 1); ++p) {
            auto path = dbm_with_coe_start(n, kappa, t_end, dt, rng, stride);
            for (int j = 0; j < n; ++j)
                out.normalized[p][j] = (path.thetas.back()[j] - path.thetas.front()[j]) / norm;
        }
    });
    out.covariance = sample_covariance(out.normalized);
    return out;
}

GffCheck gff_martingale_check(double kappa, int n, cplx z, cplx w, double t_end, double dt, std::uint64_t paths,
                              std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("gff_martingale_check: n must be positive");
    if (!(std::abs(z) < 1.0 && std::abs(w) < 1.0))
        throw std::invalid_argument("gff_martingale_check: points must lie in the open disc");
    if (std::abs(z - w) < 0.1)
        throw std::invalid_argument("gff_martingale_check: z and w must be at least 0.1 apart");
    if (z == cplx(0.0) || w == cplx(0.0))
        throw std::invalid_argument("gff_martingale_check: points must differ from the origin");
    if (paths < 2)
        throw std::invalid_argument("gff_martingale_check: need at least two paths");
    const SleConstants sc(kappa);
    const double coef = sc.chi + n / std::sqrt(kappa);
    std::vector<double> rhos(n - 1, 2.0), force(n - 1);
    for (int j = 1; j < n; ++j)
        force[j - 1] = kTwoPi * j / n;
    const double g0 = disc_green(z, w);

    std::vector<double> drift(paths), qv(paths), had(paths), jump(paths);
    std::vector<char> stopped(paths, 0);
    const std::size_t streams = 16;
    parallel_for(streams, [&](std::size_t s) {
        Rng rng = make_stream(seed, s);
        for (std::size_t p = chunk_begin(paths, streams, s); p < chunk_begin(paths, streams, s + 1); ++p) {
            auto path = sle_rho_driver(kappa, rhos, 0.0, force, t_end, dt, rng, 1);
            auto flow = loewner_flow(path, {z, w});
            const std::size_t nt = path.times.size();
            std::vector<double> angles(n);
            auto hpart = [&](std::size_t k, int q) {
                angles[0] = path.theta[k];
                for (int j = 1; j < n; ++j)
                    angles[j] = path.force[k][j - 1];
                return frak_h_lifted(angles, kappa, flow.g[k][q]);
            };
            auto h_of = [&](std::size_t k) {
                return coef * flow.arg_g[k][0] + hpart(k, 0) - sc.chi * flow.log_gprime[k][0].imag();
            };
            std::size_t stop = nt - 1;
            for (std::size_t k = 1; k < nt; ++k) {
                const double t = path.times[k];
                const bool swallowed = t >= flow.swallow_time[0] || t >= flow.swallow_time[1];
                if (swallowed) {
                    stop = k - 1;
                    stopped[p] = 1;
                    break;
                }
                if (std::abs(flow.g[k][0]) > 0.98 || std::abs(flow.g[k][1]) > 0.98) {
                    stop = k;
                    stopped[p] = 1;
                    break;
                }
            }
            double acc = 0.0, mj = 0.0;
            double hz = hpart(0, 0), hw = hpart(0, 1), hprev = h_of(0);
            for (std::size_t k = 1; k <= stop; ++k) {
                const double nz = hpart(k, 0), nw = hpart(k, 1), nh = h_of(k);
                acc += (nz - hz) * (nw - hw);
                mj = std::max({mj, std::abs(nz - hz), std::abs(nh - hprev),
                               std::abs(flow.arg_g[k][0] - flow.arg_g[k - 1][0]),
                               std::abs(flow.log_gprime[k][0].imag() - flow.log_gprime[k - 1][0].imag())});
                hz = nz;
                hw = nw;
                hprev = nh;
            }
            drift[p] = hprev - h_of(0);
            qv[p] = acc;
            had[p] = g0 - disc_green(flow.g[stop][0], flow.g[stop][1]);
            jump[p] = mj;
        }
    });
    GffCheck out;
    auto d = mean_se(drift);
    out.mean_drift = d.mean;
    out.stderr_drift = d.se;
    out.qv_empirical = mean_se(qv).mean;
    out.qv_hadamard = mean_se(had).mean;
    out.qv_mismatch = std::abs(out.qv_empirical - out.qv_hadamard) / std::abs(out.qv_hadamard);
    out.stopped_paths = std::count(stopped.begin(), stopped.end(), 1);
    out.max_lift_jump = *std::max_element(jump.begin(), jump.end());
    return out;
}

} // namespace windlab
