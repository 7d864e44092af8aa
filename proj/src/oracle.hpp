#pragma once

#include "cocycle.hpp"
#include "windows.hpp"

namespace spectra {

struct OracleReport {
    double k = 0;
    double radius = 0;
    Eigen::VectorXcd brute;    // per-letter FB approximants
    Eigen::VectorXcd cocycle;  // per-letter amplitudes from the Riesz product
    double deviation = 0;      // max_i |brute_i - cocycle_i|
};

// Volume-averaged exponential sum (1/2r) sum_{|x|<=r} e^{-2 pi i k x},
// per letter. The patch must span [-r, r].
Eigen::VectorXcd brute_fb(const TypedPointSet& patch, double k, double r, int threads = 1);

struct UniformBin {
    double expected = 0;
    double observed = 0;
    double rel_dev = 0;
};

struct UniformReport {
    std::vector<std::vector<UniformBin>> per_letter;
    double max_rel_dev = 0;
    std::size_t points_used = 0;
};

// Histogram test of the uniform-distribution statement: star-mapped control
// points against window-measure-proportional expected counts.
UniformReport uniform_distribution_test(const TypedPointSet& patch, const FieldPtr& field, const WindowSolution& windows,
                                        int bins);

struct ClosedFormReport {
    double max_error = 0;
    int grid_points = 0;
    std::string system;
};

// Closed-form cross-checks: "fibonacci" (sinc expressions) and "rho_tilde"
// (window series). Grid of y values in internal space (1D).
ClosedFormReport closed_form_check(const std::string& system_id, const FourierMatrixSpec& spec,
                                   const Eigen::VectorXd& pf_v, double eta, const std::vector<double>& grid);

// Reference series for the rho_tilde window transform f_1(y).
std::complex<double> rho_tilde_f1_series(double y);

// Fibonacci scalar recursion q_n converging to c_a(y).
std::complex<double> fibonacci_q_recursion(double y, int depth);

} // namespace spectra
