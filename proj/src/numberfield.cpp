#include "numberfield.hpp"

#include "errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace spectra {

namespace {

long double int_to_ld(const Int& v) {
    if (v.fits_slong_p()) return static_cast<long double>(v.get_si());
    return strtold(v.get_str().c_str(), nullptr);
}

Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::complex<long double> eval_poly_c(const std::vector<long double>& c, std::complex<long double> z) {
    std::complex<long double> acc(0, 0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

} // namespace

std::string rat_to_string(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string IntPoly::to_string(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Int& a = c[static_cast<size_t>(i)];
        if (a == 0) continue;
        Int mag = abs(a);
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        if (mag != 1 || i == 0) os << mag.get_str();
        if (i >= 1) {
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

IntPoly char_poly(const IntMatrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0 || m.cols() != n) throw ValidationError("char_poly: matrix must be square and nonempty");
    using RatMat = std::vector<std::vector<Rat>>;
    RatMat a(static_cast<size_t>(n), std::vector<Rat>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = Rat(static_cast<long>(m(i, j)));

    // Faddeev-LeVerrier: M_1 = A, c_{n-1} = -tr,  M_{k} = A (M_{k-1} + c_{n-k+1} I).
    std::vector<Rat> coeff(static_cast<size_t>(n) + 1);
    coeff[static_cast<size_t>(n)] = 1;
    RatMat mk = a;
    for (int k = 1; k <= n; ++k) {
        Rat tr = 0;
        for (int i = 0; i < n; ++i) tr += mk[static_cast<size_t>(i)][static_cast<size_t>(i)];
        Rat ck = -tr / k;
        coeff[static_cast<size_t>(n - k)] = ck;
        if (k == n) break;
        for (int i = 0; i < n; ++i) mk[static_cast<size_t>(i)][static_cast<size_t>(i)] += ck;
        RatMat next(static_cast<size_t>(n), std::vector<Rat>(static_cast<size_t>(n), Rat(0)));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                const Rat& ail = a[static_cast<size_t>(i)][static_cast<size_t>(l)];
                if (ail == 0) continue;
                for (int j = 0; j < n; ++j)
                    next[static_cast<size_t>(i)][static_cast<size_t>(j)] += ail * mk[static_cast<size_t>(l)][static_cast<size_t>(j)];
            }
        mk = std::move(next);
    }

    IntPoly p;
    p.c.resize(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const Rat& ci = coeff[static_cast<size_t>(i)];
        if (ci.get_den() != 1) throw ValidationError("char_poly: non-integer coefficient (internal)");
        p.c[static_cast<size_t>(i)] = ci.get_num();
    }
    return p;
}

long double eval_poly(const IntPoly& p, long double x) {
    long double acc = 0;
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * x + int_to_ld(*it);
    return acc;
}

std::vector<std::complex<long double>> poly_roots(const IntPoly& p) {
    const int deg = p.degree();
    if (deg < 1 || !p.monic()) throw ValidationError("poly_roots: need a monic polynomial of degree >= 1");

    std::vector<long double> cl(p.c.size()), dl;
    for (size_t i = 0; i < p.c.size(); ++i) cl[i] = int_to_ld(p.c[i]);
    dl.resize(static_cast<size_t>(deg));
    for (int i = 1; i <= deg; ++i) dl[static_cast<size_t>(i - 1)] = static_cast<long double>(i) * cl[static_cast<size_t>(i)];

    // Companion-matrix eigenvalues as starting points.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(int_to_ld(p.c[static_cast<size_t>(i)]));
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    if (es.info() != Eigen::Success) throw ConvergenceError("poly_roots: eigensolver failed");

    std::vector<std::complex<long double>> roots;
    roots.reserve(static_cast<size_t>(deg));
    for (int i = 0; i < deg; ++i) {
        std::complex<long double> z(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
        for (int it = 0; it < 200; ++it) {
            std::complex<long double> f = eval_poly_c(cl, z);
            std::complex<long double> df = eval_poly_c(dl, z);
            if (std::abs(df) == 0.0L) break;
            std::complex<long double> step = f / df;
            z -= step;
            if (std::abs(step) < 1e-19L * (std::abs(z) + 1.0L)) break;
        }
        roots.push_back(z);
    }
    return roots;
}

namespace {

// Exact division check: returns true iff divisor (monic) divides p over Z.
bool divides_exactly(const IntPoly& p, const IntPoly& divisor) {
    std::vector<Int> rem = p.c;
    const int dd = divisor.degree();
    for (int k = p.degree(); k >= dd; --k) {
        Int q = rem[static_cast<size_t>(k)];
        if (q == 0) continue;
        for (int i = 0; i <= dd; ++i) rem[static_cast<size_t>(k - dd + i)] -= q * divisor.c[static_cast<size_t>(i)];
    }
    for (const auto& r : rem)
        if (r != 0) return false;
    return true;
}

} // namespace

IntPoly minimal_polynomial(const IntPoly& p, double lambda) {
    auto roots = poly_roots(p);
    const long double imag_tol = 1e-9L;

    int lambda_idx = -1;
    long double best = 1e30L;
    for (size_t i = 0; i < roots.size(); ++i) {
        long double dist = std::abs(roots[i] - std::complex<long double>(lambda, 0));
        if (dist < best) {
            best = dist;
            lambda_idx = static_cast<int>(i);
        }
    }
    if (lambda_idx < 0 || best > 1e-6L || std::abs(roots[static_cast<size_t>(lambda_idx)].imag()) > imag_tol)
        throw ValidationError("minimal_polynomial: lambda is not among the roots of p");

    // Group into real roots and conjugate pairs (positive-imag representative).
    struct Item {
        std::vector<std::complex<long double>> roots; // 1 (real) or 2 (pair)
        bool has_lambda = false;
    };
    std::vector<Item> items;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(roots[i].imag()) <= imag_tol) {
            items.push_back({{std::complex<long double>(roots[i].real(), 0)}, static_cast<int>(i) == lambda_idx});
            used[i] = true;
        } else {
            size_t mate = i;
            long double bestd = 1e30L;
            for (size_t j = i + 1; j < roots.size(); ++j) {
                if (used[j]) continue;
                long double dd = std::abs(roots[j] - std::conj(roots[i]));
                if (dd < bestd) {
                    bestd = dd;
                    mate = j;
                }
            }
            if (mate == i || bestd > 1e-6L)
                throw ValidationError("minimal_polynomial: unpaired complex root (insufficient root precision)");
            used[i] = used[mate] = true;
            std::complex<long double> rep = roots[i].imag() > 0 ? roots[i] : roots[mate];
            items.push_back({{rep, std::conj(rep)}, false});
        }
    }

    int lambda_item = -1;
    for (size_t i = 0; i < items.size(); ++i)
        if (items[i].has_lambda) lambda_item = static_cast<int>(i);

    const size_t m = items.size();
    IntPoly bestpoly;
    bool found = false;
    for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
        if (!(mask & (size_t{1} << lambda_item))) continue;
        std::vector<std::complex<long double>> acc{{1.0L, 0.0L}};
        int deg = 0;
        for (size_t i = 0; i < m; ++i) {
            if (!(mask & (size_t{1} << i))) continue;
            for (const auto& r : items[i].roots) {
                acc.push_back({0.0L, 0.0L});
                for (size_t k = acc.size() - 1; k >= 1; --k) acc[k] = acc[k - 1] - r * acc[k];
                acc[0] = -r * acc[0];
                ++deg;
            }
        }
        if (found && deg >= bestpoly.degree()) continue;
        // acc holds coefficients of prod (x - r), lowest degree first.
        IntPoly cand;
        cand.c.resize(static_cast<size_t>(deg) + 1);
        bool ok = true;
        for (int i = 0; i <= deg; ++i) {
            long double re = acc[static_cast<size_t>(i)].real();
            long double im = acc[static_cast<size_t>(i)].imag();
            long double r = std::roundl(re);
            if (std::abs(re - r) > 1e-4L || std::abs(im) > 1e-4L) {
                ok = false;
                break;
            }
            cand.c[static_cast<size_t>(i)] = Int(static_cast<long>(r));
        }
        if (!ok || cand.c.back() != 1) continue;
        if (!divides_exactly(p, cand)) continue;
        bestpoly = cand;
        found = true;
    }
    if (!found) throw ValidationError("minimal_polynomial: no integer factor found (rounding ambiguity)");

    // PV unit checks on the factor itself.
    if (abs(bestpoly.c.front()) != 1)
        throw ValidationError("minimal_polynomial: constant term is not a unit (inflation factor must be a PV unit)");
    auto froots = poly_roots(bestpoly);
    for (const auto& r : froots) {
        if (std::abs(r - std::complex<long double>(lambda, 0)) < 1e-6L) continue;
        if (std::abs(r) >= 1.0L - 1e-9L)
            throw ValidationError("minimal_polynomial: conjugate root of modulus >= 1 (not a PV number)");
    }
    if (lambda <= 1.0) throw ValidationError("minimal_polynomial: inflation factor must exceed 1");
    return bestpoly;
}

std::vector<Int> smith_invariant_factors(std::vector<std::vector<Int>> a) {
    const size_t rows = a.size();
    const size_t cols = rows ? a[0].size() : 0;
    std::vector<Int> inv;
    size_t t = 0;
    while (t < rows && t < cols) {
        // Find minimal nonzero pivot in the remaining block.
        size_t pi = t, pj = t;
        bool any = false;
        Int best;
        for (size_t i = t; i < rows; ++i)
            for (size_t j = t; j < cols; ++j) {
                if (a[i][j] == 0) continue;
                Int mag = abs(a[i][j]);
                if (!any || mag < best) {
                    any = true;
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        if (!any) break;
        std::swap(a[t], a[pi]);
        for (size_t i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pj]);

        bool again = true;
        while (again) {
            again = false;
            for (size_t i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                Int q = a[i][t] / a[t][t];
                for (size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]);
                    again = true;
                }
            }
            for (size_t j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                Int q = a[t][j] / a[t][t];
                for (size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (size_t i = 0; i < rows; ++i) std::swap(a[i][t], a[i][j]);
                    again = true;
                }
            }
            if (!again) {
                // Pivot must divide every remaining entry for the chain property.
                for (size_t i = t + 1; i < rows && !again; ++i)
                    for (size_t j = t + 1; j < cols && !again; ++j)
                        if (a[i][j] % a[t][t] != 0) {
                            for (size_t jj = t; jj < cols; ++jj) a[t][jj] += a[i][jj];
                            again = true;
                        }
            }
        }
        inv.push_back(abs(a[t][t]));
        ++t;
    }
    return inv;
}

FieldElement::FieldElement(FieldPtr field, std::vector<Rat> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
    if (static_cast<int>(c_.size()) != field_->degree())
        throw ValidationError("FieldElement: coefficient count does not match field degree");
}

bool FieldElement::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

bool FieldElement::is_integral() const {
    for (const auto& x : c_)
        if (x.get_den() != 1) return false;
    return true;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] + o.c_[i];
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] - o.c_[i];
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::operator-() const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = -c_[i];
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::operator*(const Rat& s) const {
    std::vector<Rat> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] * s;
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
    const int d = field_->degree();
    std::vector<Rat> full(static_cast<size_t>(2 * d - 1), Rat(0));
    for (int i = 0; i < d; ++i) {
        if (c_[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; j < d; ++j) {
            if (o.c_[static_cast<size_t>(j)] == 0) continue;
            full[static_cast<size_t>(i + j)] += c_[static_cast<size_t>(i)] * o.c_[static_cast<size_t>(j)];
        }
    }
    std::vector<Rat> r(full.begin(), full.begin() + d);
    for (int k = d; k <= 2 * d - 2; ++k) {
        const Rat& coef = full[static_cast<size_t>(k)];
        if (coef == 0) continue;
        const auto& row = field_->reduction_rows_[static_cast<size_t>(k - d)];
        for (int i = 0; i < d; ++i) r[static_cast<size_t>(i)] += coef * row[static_cast<size_t>(i)];
    }
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::mul_lambda() const {
    const int d = field_->degree();
    std::vector<Rat> r(static_cast<size_t>(d), Rat(0));
    for (int i = 0; i + 1 < d; ++i) r[static_cast<size_t>(i + 1)] = c_[static_cast<size_t>(i)];
    const Rat& top = c_[static_cast<size_t>(d - 1)];
    if (top != 0) {
        const auto& row = field_->reduction_rows_[0];
        for (int i = 0; i < d; ++i) r[static_cast<size_t>(i)] += top * row[static_cast<size_t>(i)];
    }
    return FieldElement(field_, std::move(r));
}

FieldElement FieldElement::mul_lambda_inv() const {
    // lambda^{-1} = -(c1 + c2 L + ... + L^{d-1}) / c0 with |c0| = 1.
    const int d = field_->degree();
    const auto& mp = field_->minpoly_.c;
    std::vector<Rat> inv(static_cast<size_t>(d), Rat(0));
    Int c0 = mp[0];
    for (int i = 1; i <= d; ++i) inv[static_cast<size_t>(i - 1)] = make_rat(-mp[static_cast<size_t>(i)], c0);
    return *this * FieldElement(field_, std::move(inv));
}

FieldElement FieldElement::inverse() const {
    return field_->invert(*this);
}

double FieldElement::real_value() const {
    long double acc = 0;
    long double lam = field_->lambda_;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lam + static_cast<long double>(it->get_d());
    return static_cast<double>(acc);
}

std::string FieldElement::to_string(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) {
        const Rat& a = c_[static_cast<size_t>(i)];
        if (a == 0) continue;
        Rat mag = abs(a);
        if (first) {
            if (a < 0) os << "-";
            first = false;
        } else {
            os << (a < 0 ? " - " : " + ");
        }
        if (mag != 1 || i == 0) os << rat_to_string(mag);
        if (i >= 1) {
            if (mag != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

FieldPtr NumberField::create(IntPoly minpoly) {
    std::shared_ptr<NumberField> f(new NumberField());
    f->build(std::move(minpoly));
    return f;
}

void NumberField::build(IntPoly minpoly) {
    if (!minpoly.monic() || minpoly.degree() < 1)
        throw ValidationError("NumberField: minimal polynomial must be monic of degree >= 1");
    if (minpoly.degree() > kMaxFieldDegree)
        throw ValidationError("NumberField: degree exceeds supported maximum");
    if (abs(minpoly.c.front()) != 1)
        throw ValidationError("NumberField: constant term is not a unit");
    minpoly_ = std::move(minpoly);
    d_ = minpoly_.degree();

    auto roots = poly_roots(minpoly_);
    const long double imag_tol = 1e-9L;
    for (const auto& z : roots) {
        if (std::abs(z.imag()) <= imag_tol)
            real_roots_.push_back(z.real());
        else if (z.imag() > 0)
            complex_roots_.push_back(z);
    }
    std::sort(real_roots_.begin(), real_roots_.end(), std::greater<long double>());
    std::sort(complex_roots_.begin(), complex_roots_.end(),
              [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
    if (real_roots_.empty()) throw ValidationError("NumberField: no real root");
    if (static_cast<int>(real_roots_.size() + 2 * complex_roots_.size()) != d_)
        throw ValidationError("NumberField: repeated roots (polynomial not squarefree)");
    lambda_ = real_roots_.front();
    if (lambda_ <= 1.0L + 1e-12L) throw ValidationError("NumberField: PF root must exceed 1");
    for (size_t i = 1; i < real_roots_.size(); ++i)
        if (std::abs(real_roots_[i]) >= 1.0L - 1e-9L) throw ValidationError("NumberField: not a PV polynomial");
    for (const auto& z : complex_roots_)
        if (std::abs(z) >= 1.0L - 1e-9L) throw ValidationError("NumberField: not a PV polynomial");

    // Reduction rows lambda^{d+k}, k = 0..d-2.
    std::vector<Int> row(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) row[static_cast<size_t>(i)] = -minpoly_.c[static_cast<size_t>(i)];
    reduction_rows_.push_back(row);
    for (int k = 1; k <= d_ - 2; ++k) {
        std::vector<Int> next(static_cast<size_t>(d_), Int(0));
        Int top = row[static_cast<size_t>(d_ - 1)];
        for (int i = 0; i + 1 < d_; ++i) next[static_cast<size_t>(i + 1)] = row[static_cast<size_t>(i)];
        if (top != 0)
            for (int i = 0; i < d_; ++i) next[static_cast<size_t>(i)] += top * reduction_rows_[0][static_cast<size_t>(i)];
        reduction_rows_.push_back(next);
        row = std::move(next);
    }

    // Integer multiplication-by-lambda matrix on power-basis coordinates.
    for (int j = 0; j + 1 < d_; ++j) lambda_mat_int_[static_cast<size_t>(j + 1)][static_cast<size_t>(j)] = 1;
    for (int i = 0; i < d_; ++i) {
        const Int& v = reduction_rows_[0][static_cast<size_t>(i)];
        if (!v.fits_slong_p()) throw ValidationError("NumberField: minimal polynomial coefficients too large");
        lambda_mat_int_[static_cast<size_t>(i)][static_cast<size_t>(d_ - 1)] = v.get_si();
    }

    // Power sums tr(lambda^k) via Newton's identities, cached to 2d.
    power_sums_.resize(static_cast<size_t>(2 * d_ + 1));
    power_sums_[0] = Rat(d_);
    for (int k = 1; k <= 2 * d_; ++k) {
        Rat s = 0;
        if (k <= d_) s = Rat(-k) * Rat(minpoly_.c[static_cast<size_t>(d_ - k)]);
        for (int i = 1; i < k && i <= d_; ++i)
            s -= Rat(minpoly_.c[static_cast<size_t>(d_ - i)]) * power_sums_[static_cast<size_t>(k - i)];
        power_sums_[static_cast<size_t>(k)] = s;
    }

    // Conjugate powers for star-map evaluation.
    for (const auto& r : real_roots_) {
        std::vector<long double> pw(static_cast<size_t>(d_));
        pw[0] = 1;
        for (int i = 1; i < d_; ++i) pw[static_cast<size_t>(i)] = pw[static_cast<size_t>(i - 1)] * r;
        real_conj_pows_.push_back(std::move(pw));
    }
    for (const auto& z : complex_roots_) {
        std::vector<std::complex<long double>> pw(static_cast<size_t>(d_));
        pw[0] = {1, 0};
        for (int i = 1; i < d_; ++i) pw[static_cast<size_t>(i)] = pw[static_cast<size_t>(i - 1)] * z;
        complex_conj_pows_.push_back(std::move(pw));
    }

    // Minkowski basis matrix: columns Phi(lambda^i).
    B_.resize(d_, d_);
    for (int i = 0; i < d_; ++i) {
        int rowi = 0;
        for (const auto& pw : real_conj_pows_) B_(rowi++, i) = static_cast<double>(pw[static_cast<size_t>(i)]);
        for (const auto& pw : complex_conj_pows_) {
            B_(rowi++, i) = static_cast<double>(pw[static_cast<size_t>(i)].real());
            B_(rowi++, i) = static_cast<double>(pw[static_cast<size_t>(i)].imag());
        }
    }
    det_B_ = B_.determinant();
    Eigen::MatrixXd inv = B_.inverse();
    for (int it = 0; it < 2; ++it) inv = inv * (2.0 * Eigen::MatrixXd::Identity(d_, d_) - B_ * inv);
    Bstar_ = inv.transpose();

    // Internal contraction.
    if (d_ > 1) {
        Q_ = Eigen::MatrixXd::Zero(d_ - 1, d_ - 1);
        int at = 0;
        theta_radius_ = 0;
        for (size_t i = 1; i < real_roots_.size(); ++i) {
            Q_(at, at) = static_cast<double>(real_roots_[i]);
            theta_radius_ = std::max(theta_radius_, std::abs(Q_(at, at)));
            ++at;
        }
        for (const auto& z : complex_roots_) {
            double re = static_cast<double>(z.real());
            double im = static_cast<double>(z.imag());
            Q_(at, at) = re;
            Q_(at, at + 1) = -im;
            Q_(at + 1, at) = im;
            Q_(at + 1, at + 1) = re;
            theta_radius_ = std::max(theta_radius_, static_cast<double>(std::abs(z)));
            at += 2;
        }
    } else {
        Q_.resize(0, 0);
        theta_radius_ = 0;
    }

    // Fourier module generator theta = 1/p'(lambda), exact.
    std::vector<Rat> dp(static_cast<size_t>(d_), Rat(0));
    for (int i = 0; i < d_; ++i) dp[static_cast<size_t>(i)] = Rat(i + 1) * Rat(minpoly_.c[static_cast<size_t>(i + 1)]);
    FieldElement pprime(shared_from_this(), std::move(dp));
    theta_ = std::make_unique<FieldElement>(invert(pprime));

    // Trace-dual basis from the exact Gram-matrix inverse; cross-checks.
    {
        const int d = d_;
        std::vector<std::vector<Rat>> aug(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(2 * d), Rat(0)));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = power_sums_[static_cast<size_t>(i + j)];
            aug[static_cast<size_t>(i)][static_cast<size_t>(d + i)] = 1;
        }
        for (int col = 0; col < d; ++col) {
            int piv = -1;
            for (int i = col; i < d; ++i)
                if (aug[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) throw ValidationError("NumberField: singular trace form (internal inconsistency)");
            std::swap(aug[static_cast<size_t>(col)], aug[static_cast<size_t>(piv)]);
            Rat pv = aug[static_cast<size_t>(col)][static_cast<size_t>(col)];
            for (int j = 0; j < 2 * d; ++j) aug[static_cast<size_t>(col)][static_cast<size_t>(j)] /= pv;
            for (int i = 0; i < d; ++i) {
                if (i == col) continue;
                Rat f = aug[static_cast<size_t>(i)][static_cast<size_t>(col)];
                if (f == 0) continue;
                for (int j = 0; j < 2 * d; ++j)
                    aug[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * aug[static_cast<size_t>(col)][static_cast<size_t>(j)];
            }
        }
        for (int i = 0; i < d; ++i) {
            std::vector<Rat> ci(static_cast<size_t>(d));
            for (int j = 0; j < d; ++j) ci[static_cast<size_t>(j)] = aug[static_cast<size_t>(i)][static_cast<size_t>(d + j)];
            dual_basis_.emplace_back(shared_from_this(), std::move(ci));
        }
        if (dual_basis_.back() != *theta_)
            throw ValidationError("NumberField: dual-basis and 1/p'(lambda) derivations of theta disagree");
        // Each dual element must be theta times an integer element, with the
        // integer coordinate matrix unimodular (then <B*_1i>_Z = theta Z[lambda]).
        std::vector<std::vector<Int>> z(static_cast<size_t>(d), std::vector<Int>(static_cast<size_t>(d)));
        FieldElement pprime2(shared_from_this(), [&] {
            std::vector<Rat> v(static_cast<size_t>(d), Rat(0));
            for (int i = 0; i < d; ++i) v[static_cast<size_t>(i)] = Rat(i + 1) * Rat(minpoly_.c[static_cast<size_t>(i + 1)]);
            return v;
        }());
        for (int i = 0; i < d; ++i) {
            FieldElement w = dual_basis_[static_cast<size_t>(i)] * pprime2;
            if (!w.is_integral())
                throw ValidationError("NumberField: dual basis is not contained in theta Z[lambda]");
            for (int j = 0; j < d; ++j) z[static_cast<size_t>(i)][static_cast<size_t>(j)] = w.coeff(j).get_num();
        }
        auto invf = smith_invariant_factors(z);
        for (const auto& f : invf)
            if (f != 1) throw ValidationError("NumberField: dual basis does not generate theta Z[lambda]");
        for (int i = 0; i < d; ++i) {
            double fromdual = dual_basis_[static_cast<size_t>(i)].real_value();
            if (std::abs(fromdual - Bstar_(0, i)) > 1e-8)
                throw ValidationError("NumberField: dual-basis row disagrees with numeric B* (internal inconsistency)");
        }
    }
}

FieldElement NumberField::element(std::vector<Rat> coeffs) const {
    return FieldElement(shared_from_this(), std::move(coeffs));
}

FieldElement NumberField::from_int(long v) const {
    std::vector<Rat> c(static_cast<size_t>(d_), Rat(0));
    c[0] = Rat(v);
    return FieldElement(shared_from_this(), std::move(c));
}

FieldElement NumberField::lambda_element() const {
    std::vector<Rat> c(static_cast<size_t>(d_), Rat(0));
    if (d_ > 1)
        c[1] = 1;
    else
        c[0] = Rat(minpoly_.c[0]) * -1; // degree-1 field: lambda is rational
    return FieldElement(shared_from_this(), std::move(c));
}

Rat NumberField::trace(const FieldElement& x) const {
    Rat s = 0;
    for (int i = 0; i < d_; ++i) s += x.coeff(i) * power_sums_[static_cast<size_t>(i)];
    return s;
}

const Rat& NumberField::power_sum(int k) const {
    if (k < 0 || k >= static_cast<int>(power_sums_.size()))
        throw ValidationError("NumberField: power sum index out of precomputed range");
    return power_sums_[static_cast<size_t>(k)];
}

Eigen::VectorXd NumberField::star_map(const FieldElement& x) const {
    Eigen::VectorXd out(d_ - 1);
    int at = 0;
    for (size_t rj = 1; rj < real_conj_pows_.size(); ++rj) {
        long double acc = 0;
        for (int i = 0; i < d_; ++i) acc += static_cast<long double>(x.coeff(i).get_d()) * real_conj_pows_[rj][static_cast<size_t>(i)];
        out(at++) = static_cast<double>(acc);
    }
    for (const auto& pw : complex_conj_pows_) {
        std::complex<long double> acc(0, 0);
        for (int i = 0; i < d_; ++i) acc += static_cast<long double>(x.coeff(i).get_d()) * pw[static_cast<size_t>(i)];
        out(at++) = static_cast<double>(acc.real());
        out(at++) = static_cast<double>(acc.imag());
    }
    return out;
}

Eigen::VectorXd NumberField::star_map_int(const std::array<std::int64_t, kMaxFieldDegree>& coeffs) const {
    Eigen::VectorXd out(d_ - 1);
    int at = 0;
    for (size_t rj = 1; rj < real_conj_pows_.size(); ++rj) {
        long double acc = 0;
        for (int i = 0; i < d_; ++i) acc += static_cast<long double>(coeffs[static_cast<size_t>(i)]) * real_conj_pows_[rj][static_cast<size_t>(i)];
        out(at++) = static_cast<double>(acc);
    }
    for (const auto& pw : complex_conj_pows_) {
        std::complex<long double> acc(0, 0);
        for (int i = 0; i < d_; ++i) acc += static_cast<long double>(coeffs[static_cast<size_t>(i)]) * pw[static_cast<size_t>(i)];
        out(at++) = static_cast<double>(acc.real());
        out(at++) = static_cast<double>(acc.imag());
    }
    return out;
}

FieldElement NumberField::miller_element(const std::vector<long>& miller) const {
    if (static_cast<int>(miller.size()) != d_)
        throw ValidationError("miller_element: index count must equal the field degree");
    std::vector<Rat> c(static_cast<size_t>(d_));
    for (int i = 0; i < d_; ++i) c[static_cast<size_t>(i)] = Rat(miller[static_cast<size_t>(i)]);
    return FieldElement(shared_from_this(), std::move(c)) * (*theta_);
}

long double NumberField::real_value_int(const std::array<std::int64_t, kMaxFieldDegree>& coeffs) const {
    long double acc = 0;
    for (int i = d_ - 1; i >= 0; --i) acc = acc * lambda_ + static_cast<long double>(coeffs[static_cast<size_t>(i)]);
    return acc;
}

FieldElement NumberField::invert(const FieldElement& x) const {
    if (x.is_zero()) throw ValidationError("FieldElement: division by zero");
    const int d = d_;
    // Columns of the multiplication-by-x matrix: x * lambda^j.
    std::vector<std::vector<Rat>> aug(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(d + 1), Rat(0)));
    FieldElement col = x;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = col.coeff(i);
        if (j + 1 < d) col = col.mul_lambda();
    }
    aug[0][static_cast<size_t>(d)] = 1;
    for (int c = 0; c < d; ++c) {
        int piv = -1;
        for (int i = c; i < d; ++i)
            if (aug[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw ValidationError("FieldElement: inversion failed (zero divisor?)");
        std::swap(aug[static_cast<size_t>(c)], aug[static_cast<size_t>(piv)]);
        Rat pv = aug[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int j = 0; j <= d; ++j) aug[static_cast<size_t>(c)][static_cast<size_t>(j)] /= pv;
        for (int i = 0; i < d; ++i) {
            if (i == c) continue;
            Rat f = aug[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int j = 0; j <= d; ++j) aug[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * aug[static_cast<size_t>(c)][static_cast<size_t>(j)];
        }
    }
    std::vector<Rat> res(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) res[static_cast<size_t>(i)] = aug[static_cast<size_t>(i)][static_cast<size_t>(d)];
    return FieldElement(shared_from_this(), std::move(res));
}

std::vector<FieldElement> field_kernel(const std::vector<std::vector<FieldElement>>& m) {
    const size_t n = m.size();
    if (n == 0 || m[0].size() != n) throw ValidationError("field_kernel: matrix must be square");
    FieldPtr field = m[0][0].field_ptr();
    std::vector<std::vector<FieldElement>> a = m;
    std::vector<int> pivot_col;
    size_t prow = 0;
    for (size_t col = 0; col < n && prow < n; ++col) {
        size_t piv = prow;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) continue;
        std::swap(a[prow], a[piv]);
        FieldElement inv = a[prow][col].inverse();
        for (size_t j = col; j < n; ++j) a[prow][j] = a[prow][j] * inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == prow || a[i][col].is_zero()) continue;
            FieldElement f = a[i][col];
            for (size_t j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[prow][j];
        }
        pivot_col.push_back(static_cast<int>(col));
        ++prow;
    }
    if (prow != n - 1) throw ValidationError("field_kernel: kernel is not one-dimensional");
    // Free column = the one not among pivots.
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
    size_t free_col = 0;
    while (free_col < n && is_pivot[free_col]) ++free_col;
    std::vector<FieldElement> kern(n, field->zero());
    kern[free_col] = field->one();
    for (size_t r = 0; r < prow; ++r) kern[static_cast<size_t>(pivot_col[r])] = -a[r][free_col];
    return kern;
}

} // namespace spectra
