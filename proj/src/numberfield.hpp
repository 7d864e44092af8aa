#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace spectra {

using Int = mpz_class;
using Rat = mpq_class;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kMaxFieldDegree = 8;

// Monic integer polynomial c[0] + c[1] x + ... + x^deg (c.back() == 1).
struct IntPoly {
    std::vector<Int> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool monic() const { return !c.empty() && c.back() == 1; }
    std::string to_string(const std::string& var = "x") const;
};

// Exact characteristic polynomial det(xI - M) via Faddeev-LeVerrier.
IntPoly char_poly(const IntMatrix& m);

// Polynomial evaluation and root extraction (long double working precision).
long double eval_poly(const IntPoly& p, long double x);
std::vector<std::complex<long double>> poly_roots(const IntPoly& p);

// Unique monic integer factor of p vanishing at lambda (lambda the PF root of
// the matrix p came from). Throws ValidationError on rounding ambiguity or if
// the factor is not a PV unit polynomial.
IntPoly minimal_polynomial(const IntPoly& p, double lambda);

// Smith normal form over Z; returns the invariant factors (non-negative,
// divisibility chain) of an arbitrary integer matrix.
std::vector<Int> smith_invariant_factors(std::vector<std::vector<Int>> a);

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

// Element of Q(lambda) as exact rational coordinates on the power basis
// {1, lambda, ..., lambda^{d-1}}. Immutable value type.
class FieldElement {
public:
    FieldElement() = default;
    FieldElement(FieldPtr field, std::vector<Rat> coeffs);

    const NumberField& field() const { return *field_; }
    FieldPtr field_ptr() const { return field_; }
    const std::vector<Rat>& coeffs() const { return c_; }
    const Rat& coeff(int i) const { return c_[static_cast<size_t>(i)]; }

    bool is_zero() const;
    bool is_integral() const;           // all coordinates in Z
    bool operator==(const FieldElement& o) const { return c_ == o.c_; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator*(const Rat& r) const;
    FieldElement inverse() const;       // throws on zero
    FieldElement mul_lambda() const;
    FieldElement mul_lambda_inv() const;

    double real_value() const;          // image under the identity embedding
    std::string to_string(const std::string& var = "L") const;

private:
    FieldPtr field_;
    std::vector<Rat> c_;
};

// The field Q(lambda) for a PV unit lambda, together with everything the cut
// and project scheme needs: conjugate roots, Minkowski basis matrix and its
// dual, internal contraction, and the Fourier module generator.
class NumberField : public std::enable_shared_from_this<NumberField> {
public:
    // Throws ValidationError unless minpoly is a PV-unit polynomial (monic,
    // irreducible over the produced factorisation path, |constant| = 1, one
    // real root > 1, all others strictly inside the unit disk).
    static FieldPtr create(IntPoly minpoly);

    int degree() const { return d_; }
    const IntPoly& minpoly() const { return minpoly_; }
    double lambda() const { return static_cast<double>(lambda_); }
    long double lambda_l() const { return lambda_; }

    int num_real_roots() const { return static_cast<int>(real_roots_.size()); }
    int num_complex_pairs() const { return static_cast<int>(complex_roots_.size()); }
    // Real conjugates in descending order, first entry = lambda.
    const std::vector<long double>& real_roots() const { return real_roots_; }
    // One representative per complex pair, positive imaginary part,
    // descending modulus.
    const std::vector<std::complex<long double>>& complex_roots() const { return complex_roots_; }

    // Minkowski embedding data.
    const Eigen::MatrixXd& basis_matrix() const { return B_; }        // columns Phi(lambda^i)
    const Eigen::MatrixXd& dual_basis_matrix() const { return Bstar_; }
    const Eigen::MatrixXd& contraction() const { return Q_; }         // internal action of x -> lambda x
    double contraction_radius() const { return theta_radius_; }       // spectral radius of Q, < 1
    double det_basis() const { return det_B_; }

    // Fourier module generator: L(dual) = theta * Z[lambda], theta = 1/p'(lambda).
    const FieldElement& fourier_generator() const { return *theta_; }
    // Trace-dual basis of the power basis (exact); last element equals theta.
    const std::vector<FieldElement>& dual_power_basis() const { return dual_basis_; }

    FieldElement element(std::vector<Rat> coeffs) const;
    FieldElement from_int(long v) const;
    FieldElement zero() const { return from_int(0); }
    FieldElement one() const { return from_int(1); }
    FieldElement lambda_element() const;

    // Number-theoretic trace, exact (Newton power sums on the minpoly).
    Rat trace(const FieldElement& x) const;
    const Rat& power_sum(int k) const;  // tr(lambda^k), k >= 0 (cached/extended)

    // Galois conjugate coordinates (kappa_2,..,kappa_r, Re s_1, Im s_1, ...).
    Eigen::VectorXd star_map(const FieldElement& x) const;
    Eigen::VectorXd star_map_int(const std::array<std::int64_t, kMaxFieldDegree>& coeffs) const;

    // k in the Fourier module from Miller indices: theta * sum_i m_i lambda^i.
    FieldElement miller_element(const std::vector<long>& miller) const;

    // Fast embedding of integer-coordinate elements.
    long double real_value_int(const std::array<std::int64_t, kMaxFieldDegree>& coeffs) const;
    // Multiplication by lambda on integer coordinate vectors (exact, integer).
    const std::array<std::array<std::int64_t, kMaxFieldDegree>, kMaxFieldDegree>& lambda_action_int() const {
        return lambda_mat_int_;
    }

private:
    NumberField() = default;
    void build(IntPoly minpoly);
    FieldElement invert(const FieldElement& x) const;
    friend class FieldElement;

    IntPoly minpoly_;
    int d_ = 0;
    long double lambda_ = 0;
    std::vector<long double> real_roots_;
    std::vector<std::complex<long double>> complex_roots_;

    // lambda^{d+k} on the power basis, k = 0..d-2 (exact integer rows).
    std::vector<std::vector<Int>> reduction_rows_;
    std::array<std::array<std::int64_t, kMaxFieldDegree>, kMaxFieldDegree> lambda_mat_int_{};
    mutable std::vector<Rat> power_sums_;

    // Conjugate powers conj_pows_[root][i] for fast star-map evaluation.
    std::vector<std::vector<long double>> real_conj_pows_;
    std::vector<std::vector<std::complex<long double>>> complex_conj_pows_;

    Eigen::MatrixXd B_, Bstar_, Q_;
    double det_B_ = 0;
    double theta_radius_ = 0;
    std::unique_ptr<FieldElement> theta_;
    std::vector<FieldElement> dual_basis_;
};

// Exact one-dimensional kernel of a square matrix over Q(lambda); throws if
// the kernel is not one-dimensional. Used for exact PF eigenvectors.
std::vector<FieldElement> field_kernel(const std::vector<std::vector<FieldElement>>& m);

// Renders a rational as "p/q" (or "p").
std::string rat_to_string(const Rat& r);

} // namespace spectra
