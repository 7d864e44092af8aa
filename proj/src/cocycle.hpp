#pragma once

#include "substitution.hpp"

#include <complex>

namespace spectra {

// Internal Fourier matrix data: entry (i,j) carries the star-mapped
// displacement exponents of the trigonometric polynomial
// B_ij(y) = sum_t exp(2 pi i <t*, y>).
struct FourierMatrixSpec {
    int n = 0;
    int dim = 0; // internal dimension d-1
    std::vector<std::vector<std::vector<Eigen::VectorXd>>> exponents;
    IntMatrix counts;       // substitution matrix, B(0) = counts
    Eigen::MatrixXd r;      // R = Q^T, drives the cocycle
    double lambda = 0;
    double beta = 0;        // 1/lambda (unit inflation)
    double theta = 0;       // spectral radius of Q (convergence rate)
};

FourierMatrixSpec fourier_spec(const Displacement& disp, const FieldPtr& field);

Eigen::MatrixXcd eval_internal_fourier(const FourierMatrixSpec& spec, const Eigen::VectorXd& y);

// B(y) B(Ry) ... B(R^{n-1} y); n = 0 gives the identity.
Eigen::MatrixXcd cocycle_product(const FourierMatrixSpec& spec, const Eigen::VectorXd& y, int n);

struct RieszResult {
    Eigen::MatrixXcd C;
    Eigen::VectorXcd c;      // C v
    int n_used = 0;
    double residual = 0;     // max-norm difference of the last two scaled products
    double first_singular = 0;
    double second_singular = 0;
    bool converged = true;
};

// Matrix Riesz product C(y) = lim beta^n B(y) B(Ry) ... B(R^{n-1}y), with
// c(y) = C(y) v and an SVD rank-1 certificate. Non-convergence within n_max
// is reported, not thrown.
RieszResult riesz_limit(const FourierMatrixSpec& spec, const Eigen::VectorXd& y, const Eigen::VectorXd& pf_v,
                        double tol = 1e-10, int n_max = 200);

// Window Fourier transforms f_i(y) = eta c_i(y).
Eigen::VectorXcd window_ft(const RieszResult& result, double eta);

// Direct-space Fourier matrix B(k) = sum_t exp(2 pi i t k) (consistency checks).
Eigen::MatrixXcd eval_direct_fourier(const Displacement& disp, double k);

} // namespace spectra
