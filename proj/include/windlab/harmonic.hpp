#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "windlab/lattice.hpp"

namespace windlab {

using cplx = std::complex<double>;

struct SolverOptions {
    double tolerance = 1e-10;   // max-norm residual accepted for linear solves
    int direct_limit = 50000;   // above this many unknowns, solves use CG
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Q_beta restricted to non-absorbed vertices, in the compact numbering of
// AnnularLattice::free_index: Q[u][w] = exp(i beta sign(u->w)) / deg(u).
Eigen::SparseMatrix<cplx> transition_matrix(const AnnularLattice& lattice, const Zipper& zipper, double beta);

// Factorisation of I - Q_beta.  The matrix is similar to the Hermitian
// positive definite I - D^{1/2} Q D^{-1/2}, which is what gets factorised.
class GaugedOperator {
public:
    GaugedOperator(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                   SolverOptions options = {}, bool factorize = true);
    ~GaugedOperator();
    GaugedOperator(GaugedOperator&&) noexcept;

    double beta() const { return beta_; }

    // log det(I - Q_beta); the determinant is real and positive.
    double log_det() const;

    // Solves (I - Q_beta) x = b on the non-absorbed vertices.  Reports the
    // max-norm residual through `residual` when given.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b, double* residual = nullptr) const;

    // Gauged hitting kernel for `target`, indexed by all lattice vertices.
    std::vector<cplx> hitting(int target, double* residual = nullptr) const;

    // Matrix (h(x_i, v_j)).
    Eigen::MatrixXcd hitting_matrix(const std::vector<int>& xs, const std::vector<int>& vs) const;

    cplx phase(int u, int slot) const;

private:
    struct Impl;
    const AnnularLattice* lattice_;
    const Zipper* zipper_;
    double beta_;
    SolverOptions options_;
    std::unique_ptr<Impl> impl_;
};

struct HittingKernel {
    std::vector<cplx> values;
    int target = -1;
    double residual = 0.0;
};

HittingKernel hitting_kernel(const AnnularLattice& lattice, const Zipper& zipper, double beta, int target,
                             SolverOptions options = {});

cplx fomin_determinant(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                       const std::vector<int>& xs, const std::vector<int>& vs);

// exp(Lambda_{beta1}[L] - Lambda_{beta2}[L]) = det(I - Q_{beta2}) / det(I - Q_{beta1}).
// Real and positive.
double loop_mass_ratio(const AnnularLattice& lattice, const Zipper& zipper, double beta1, double beta2);

struct WindingExact {
    cplx cf;               // E[exp(i beta sum_j K_j) | E_{x,v}]
    double event_probability = 0.0;  // P[E_{x,v}]
};

// xs and vs are relabelled counterclockwise starting after the cut before
// the determinants are formed.
WindingExact winding_cf_exact(const AnnularLattice& lattice, const Zipper& zipper, double beta,
                              const std::vector<int>& xs, const std::vector<int>& vs);

// Entry (z, w) of (I - Q_0)^{-1}: expected visits to w before absorption.
double green_nd(const AnnularLattice& lattice, int z, int w);

// Sanity checks shared by the Fomin entry points.
void check_marked_points(const AnnularLattice& lattice, const std::vector<int>& xs, const std::vector<int>& vs);

} // namespace windlab
