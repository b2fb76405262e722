#include "windlab/harmonic.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace windlab {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

SpMat symmetrized_system(const AnnularLattice& lat, const Zipper& zip, double beta)
{
    const int n = lat.free_count();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(5 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int u = lat.free_vertex(i);
        trips.emplace_back(i, i, cplx(1.0, 0.0));
        const double du = lat.degree(u);
        for (int d = 0; d < 4; ++d) {
            const int w = lat.neighbor_slots(u)[d];
            if (w < 0 || lat.is_outer(w))
                continue;
            const double dw = lat.degree(w);
            const cplx ph = std::polar(1.0, beta * zip.sign_by_slot(u, d));
            trips.emplace_back(i, lat.free_index(w), -ph / std::sqrt(du * dw));
        }
    }
    SpMat a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

} // namespace

Eigen::SparseMatrix<cplx> transition_matrix(const AnnularLattice& lat, const Zipper& zip, double beta)
{
    const int n = lat.free_count();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int i = 0; i < n; ++i) {
        const int u = lat.free_vertex(i);
        for (int d = 0; d < 4; ++d) {
            const int w = lat.neighbor_slots(u)[d];
            if (w < 0 || lat.is_outer(w))
                continue;
            trips.emplace_back(i, lat.free_index(w), std::polar(1.0, beta * zip.sign_by_slot(u, d)) / double(lat.degree(u)));
        }
    }
    SpMat q(n, n);
    q.setFromTriplets(trips.begin(), trips.end());
    return q;
}

struct GaugedOperator::Impl {
    SpMat system;
    Eigen::VectorXd sqrt_deg;
    std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;
    double log_det = 0.0;
};

GaugedOperator::GaugedOperator(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                               SolverOptions options, bool factorize)
    : lattice_(&lattice), zipper_(&zipper), beta_(beta), options_(options), impl_(std::make_unique<Impl>())
{
    impl_->system = symmetrized_system(lattice, zipper, beta);
    const int n = lattice.free_count();
    impl_->sqrt_deg.resize(n);
    for (int i = 0; i < n; ++i)
        impl_->sqrt_deg[i] = std::sqrt(double(lattice.degree(lattice.free_vertex(i))));
    if (factorize || n <= options_.direct_limit) {
        impl_->ldlt = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(impl_->system);
        if (impl_->ldlt->info() != Eigen::Success)
            throw SolverError("GaugedOperator: factorisation failed (singular system)", INFINITY);
        const auto diag = impl_->ldlt->vectorD();
        double s = 0.0;
        for (int i = 0; i < diag.size(); ++i) {
            const double d = diag[i].real();
            if (!(d > 0.0))
                throw SolverError("GaugedOperator: system is not positive definite", INFINITY);
            s += std::log(d);
        }
        impl_->log_det = s;
    }
}

GaugedOperator::~GaugedOperator() = default;
GaugedOperator::GaugedOperator(GaugedOperator&&) noexcept = default;

double GaugedOperator::log_det() const
{
    if (!impl_->ldlt)
        throw std::logic_error("GaugedOperator: determinant requested without factorisation");
    return impl_->log_det;
}

cplx GaugedOperator::phase(int u, int slot) const
{
    return std::polar(1.0, beta_ * zipper_->sign_by_slot(u, slot));
}

Eigen::VectorXcd GaugedOperator::solve(const Eigen::VectorXcd& b, double* residual) const
{
    const auto& sd = impl_->sqrt_deg;
    Eigen::VectorXcd rhs = sd.cwiseProduct(b);
    Eigen::VectorXcd y;
    const bool direct = impl_->ldlt && lattice_->free_count() <= options_.direct_limit;
    if (direct) {
        y = impl_->ldlt->solve(rhs);
    } else {
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<cplx>> cg;
        cg.setTolerance(options_.tolerance * 1e-3);
        cg.setMaxIterations(20 * lattice_->free_count());
        cg.compute(impl_->system);
        y = cg.solve(rhs);
    }
    Eigen::VectorXcd x = y.cwiseQuotient(sd);
    // Residual of the original (unsymmetrised) system, max norm.
    Eigen::VectorXcd r = impl_->system * y - rhs;
    double res = r.cwiseQuotient(sd).cwiseAbs().maxCoeff();
    if (residual)
        *residual = res;
    if (!(res <= options_.tolerance))
        throw SolverError("GaugedOperator: residual " + std::to_string(res) + " above tolerance", res);
    return x;
}

std::vector<cplx> GaugedOperator::hitting(int target, double* residual) const
{
    const auto& lat = *lattice_;
    if (target < 0 || target >= lat.size() || !lat.is_outer(target))
        throw std::invalid_argument("hitting_kernel: target must be an outer boundary vertex");
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(lat.free_count());
    for (int d = 0; d < 4; ++d) {
        const int u = lat.neighbor_slots(target)[d];
        if (u < 0 || lat.is_outer(u))
            continue;
        const int back = (d + 2) % 4;  // slot of u -> target
        b[lat.free_index(u)] += phase(u, back) / double(lat.degree(u));
    }
    Eigen::VectorXcd h = solve(b, residual);
    std::vector<cplx> out(lat.size(), cplx(0.0, 0.0));
    for (int i = 0; i < lat.free_count(); ++i)
        out[lat.free_vertex(i)] = h[i];
    out[target] = 1.0;
    return out;
}

Eigen::MatrixXcd GaugedOperator::hitting_matrix(const std::vector<int>& xs, const std::vector<int>& vs) const
{
    Eigen::MatrixXcd m(xs.size(), vs.size());
    for (std::size_t j = 0; j < vs.size(); ++j) {
        auto h = hitting(vs[j]);
        for (std::size_t i = 0; i < xs.size(); ++i)
            m(i, j) = h[xs[i]];
    }
    return m;
}

HittingKernel hitting_kernel(const AnnularLattice& lattice, const Zipper& zipper, double beta, int target,
                             SolverOptions options)
{
    const bool factor = lattice.free_count() <= options.direct_limit;
    GaugedOperator op(lattice, zipper, beta, options, factor);
    HittingKernel out;
    out.target = target;
    out.values = op.hitting(target, &out.residual);
    return out;
}

void check_marked_points(const AnnularLattice& lattice, const std::vector<int>& xs, const std::vector<int>& vs)
{
    if (xs.size() != vs.size() || xs.empty())
        throw std::invalid_argument("need the same positive number of inner and outer points");
    if (std::set<int>(xs.begin(), xs.end()).size() != xs.size())
        throw std::invalid_argument("repeated inner point");
    if (std::set<int>(vs.begin(), vs.end()).size() != vs.size())
        throw std::invalid_argument("repeated outer point");
    for (int x : xs)
        if (x < 0 || x >= lattice.size() || !lattice.is_inner(x))
            throw std::invalid_argument("marked point is not on the inner boundary");
    for (int v : vs)
        if (v < 0 || v >= lattice.size() || !lattice.is_outer(v))
            throw std::invalid_argument("marked point is not on the outer boundary");
}

cplx fomin_determinant(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                       const std::vector<int>& xs, const std::vector<int>& vs)
{
    check_marked_points(lattice, xs, vs);
    GaugedOperator op(lattice, zipper, beta);
    return op.hitting_matrix(xs, vs).determinant();
}

double loop_mass_ratio(const AnnularLattice& lattice, const Zipper& zipper, double beta1, double beta2)
{
    GaugedOperator a(lattice, zipper, beta1), b(lattice, zipper, beta2);
    return std::exp(b.log_det() - a.log_det());
}

WindingExact winding_cf_exact(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                              const std::vector<int>& xs_in, const std::vector<int>& vs_in)
{
    check_marked_points(lattice, xs_in, vs_in);
    const auto xs = canonical_order(zipper, xs_in);
    const auto vs = canonical_order(zipper, vs_in);
    const std::size_t n = xs.size();
    constexpr double pi = std::numbers::pi;
    WindingExact out;
    if (n % 2 == 1) {
        GaugedOperator g0(lattice, zipper, 0.0), gb(lattice, zipper, beta);
        const cplx d0 = g0.hitting_matrix(xs, vs).determinant();
        const cplx db = gb.hitting_matrix(xs, vs).determinant();
        out.event_probability = d0.real();
        out.cf = std::exp(gb.log_det() - g0.log_det()) * db / d0;
    } else {
        GaugedOperator g0(lattice, zipper, 0.0), gp(lattice, zipper, pi), gb(lattice, zipper, beta + pi);
        const cplx dp = gp.hitting_matrix(xs, vs).determinant();
        const cplx db = gb.hitting_matrix(xs, vs).determinant();
        out.event_probability = std::exp(gp.log_det() - g0.log_det()) * dp.real();
        out.cf = std::exp(gb.log_det() - gp.log_det()) * db / dp;
    }
    if (!(out.event_probability > 1e-300))
        throw std::domain_error("winding_cf_exact: conditioning event has zero mass");
    return out;
}

double green_nd(const AnnularLattice& lattice, int z, int w)
{
    for (int v : {z, w})
        if (v < 0 || v >= lattice.size() || lattice.is_outer(v))
            throw std::invalid_argument("green_nd: arguments must be non-absorbed vertices");
    Zipper none = Zipper::none(lattice);
    GaugedOperator op(lattice, none, 0.0);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(lattice.free_count());
    e[lattice.free_index(w)] = 1.0;
    return op.solve(e)[lattice.free_index(z)].real();
}

} // namespace windlab
