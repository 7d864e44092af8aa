#include "cocycle.hpp"

#include "errors.hpp"
#include "windows.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace spectra {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

FourierMatrixSpec fourier_spec(const Displacement& disp, const FieldPtr& field) {
    FourierMatrixSpec spec;
    spec.n = disp.size();
    spec.dim = field->degree() - 1;
    spec.exponents = star_displacements(disp, field);
    spec.counts = IntMatrix::Zero(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j)
            spec.counts(i, j) = static_cast<std::int64_t>(spec.exponents[static_cast<size_t>(i)][static_cast<size_t>(j)].size());
    spec.r = field->contraction().transpose();
    spec.lambda = field->lambda();
    spec.beta = 1.0 / spec.lambda;
    spec.theta = field->contraction_radius();
    return spec;
}

Eigen::MatrixXcd eval_internal_fourier(const FourierMatrixSpec& spec, const Eigen::VectorXd& y) {
    if (y.size() != spec.dim) throw ValidationError("eval_internal_fourier: wrong internal dimension");
    Eigen::MatrixXcd b(spec.n, spec.n);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.n; ++j) {
            std::complex<double> acc(0, 0);
            for (const auto& t : spec.exponents[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                double phase = kTwoPi * t.dot(y);
                acc += std::complex<double>(std::cos(phase), std::sin(phase));
            }
            b(i, j) = acc;
        }
    return b;
}

Eigen::MatrixXcd cocycle_product(const FourierMatrixSpec& spec, const Eigen::VectorXd& y, int n) {
    if (n < 0) throw ValidationError("cocycle_product: n must be >= 0");
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(spec.n, spec.n);
    Eigen::VectorXd yk = y;
    for (int k = 0; k < n; ++k) {
        p = p * eval_internal_fourier(spec, yk);
        yk = spec.r * yk;
    }
    return p;
}

RieszResult riesz_limit(const FourierMatrixSpec& spec, const Eigen::VectorXd& y, const Eigen::VectorXd& pf_v, double tol,
                        int n_max) {
    if (tol <= 0) throw ValidationError("riesz_limit: tolerance must be positive");
    RieszResult out;
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(spec.n, spec.n);
    Eigen::VectorXd yk = y;
    double residual = std::numeric_limits<double>::infinity();
    int n = 0;
    while (n < n_max) {
        Eigen::MatrixXcd next = spec.beta * (p * eval_internal_fourier(spec, yk));
        residual = (next - p).cwiseAbs().maxCoeff();
        p = std::move(next);
        yk = spec.r * yk;
        ++n;
        if (residual < tol && n >= 2) break;
    }
    out.C = p;
    out.n_used = n;
    out.residual = residual;
    out.converged = residual < tol;
    out.c = p * pf_v.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
    out.first_singular = svd.singularValues()(0);
    out.second_singular = spec.n > 1 ? svd.singularValues()(1) : 0.0;
    return out;
}

Eigen::VectorXcd window_ft(const RieszResult& result, double eta) {
    return eta * result.c;
}

Eigen::MatrixXcd eval_direct_fourier(const Displacement& disp, double k) {
    const int n = disp.size();
    Eigen::MatrixXcd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::complex<double> acc(0, 0);
            for (const auto& t : disp.entry[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                double phase = kTwoPi * t.real_value() * k;
                acc += std::complex<double>(std::cos(phase), std::sin(phase));
            }
            b(i, j) = acc;
        }
    return b;
}

} // namespace spectra
