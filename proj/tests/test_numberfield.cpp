#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "numberfield.hpp"
#include "substitution.hpp"

#include <cmath>

using namespace spectra;

namespace {

FieldPtr field_for(const std::string& rule_text) {
    RuleFile rf = parse_rule(rule_text);
    IntMatrix m = substitution_matrix(rf.rule);
    PFData pf = pf_eigendata(m);
    return NumberField::create(minimal_polynomial(char_poly(m), pf.lambda));
}

FieldElement el(const FieldPtr& f, std::vector<long> num, long den = 1) {
    std::vector<Rat> c;
    for (long v : num) {
        Rat r(v, den);
        r.canonicalize();
        c.push_back(r);
    }
    return f->element(std::move(c));
}

const char* kFib = "a -> ab ; b -> a";
const char* kTri = "a -> ab ; b -> ac ; c -> a";
const char* kPisa4 = "a -> ab ; b -> ac ; c -> ad ; d -> a";
const char* kTwistedExt = "a -> ab ; A -> AB ; b -> A ; B -> a";

} // namespace

TEST_CASE("characteristic polynomial is exact") {
    RuleFile rf = parse_rule(kFib);
    IntPoly p = char_poly(substitution_matrix(rf.rule));
    REQUIRE(p.degree() == 2);
    CHECK(p.c[0] == -1); // x^2 - x - 1
    CHECK(p.c[1] == -1);
    CHECK(p.c[2] == 1);
}

TEST_CASE("minimal polynomial: Tribonacci cubic") {
    RuleFile rf = parse_rule(kTri);
    IntMatrix m = substitution_matrix(rf.rule);
    PFData pf = pf_eigendata(m);
    IntPoly mp = minimal_polynomial(char_poly(m), pf.lambda);
    REQUIRE(mp.degree() == 3);
    CHECK(mp.c[0] == -1);
    CHECK(mp.c[1] == -1);
    CHECK(mp.c[2] == -1);
    CHECK(mp.c[3] == 1);
}

TEST_CASE("minimal polynomial: reducible quartic of the twisted Fibonacci extension") {
    RuleFile rf = parse_rule(kTwistedExt);
    IntMatrix m = substitution_matrix(rf.rule);
    PFData pf = pf_eigendata(m);
    IntPoly p = char_poly(m);
    REQUIRE(p.degree() == 4);
    IntPoly mp = minimal_polynomial(p, pf.lambda);
    REQUIRE(mp.degree() == 2); // x^2 - x - 1
    CHECK(mp.c[0] == -1);
    CHECK(mp.c[1] == -1);
}

TEST_CASE("minimal polynomial: Pisa family x^d - (1 + x + ... + x^{d-1})") {
    for (int d = 2; d <= 6; ++d) {
        std::string text;
        for (int i = 0; i < d; ++i) {
            char me = static_cast<char>('a' + i);
            char nx = static_cast<char>('a' + i + 1);
            text += std::string(1, me) + " -> " + (i + 1 < d ? std::string("a") + nx : "a") + " ; ";
        }
        RuleFile rf = parse_rule(text);
        IntMatrix m = substitution_matrix(rf.rule);
        PFData pf = pf_eigendata(m);
        IntPoly mp = minimal_polynomial(char_poly(m), pf.lambda);
        REQUIRE(mp.degree() == d);
        for (int i = 0; i < d; ++i) CHECK(mp.c[static_cast<size_t>(i)] == -1);
        CHECK(mp.c[static_cast<size_t>(d)] == 1);
    }
}

TEST_CASE("non-unit constant term is rejected") {
    // x^2 - 2x - 2 has lambda = 1 + sqrt(3) but constant term -2.
    IntPoly p;
    p.c = {Int(-2), Int(-2), Int(1)};
    CHECK_THROWS_AS(NumberField::create(p), ValidationError);
}

TEST_CASE("field arithmetic: golden ratio relations") {
    auto f = field_for(kFib);
    FieldElement tau = f->lambda_element();
    CHECK(tau * tau == el(f, {1, 1})); // tau^2 = tau + 1
    CHECK((tau * tau - tau - f->one()).is_zero());
    CHECK(tau.inverse() == el(f, {-1, 1})); // 1/tau = tau - 1
}

TEST_CASE("field arithmetic: Tribonacci inverse powers") {
    auto f = field_for(kTri);
    FieldElement lam = f->lambda_element();
    CHECK(f->one().mul_lambda_inv() == el(f, {-1, -1, 1}));       // 1/lambda = lambda^2 - lambda - 1
    CHECK(f->one().mul_lambda_inv().mul_lambda_inv() == el(f, {0, 2, -1})); // lambda^{-2} = lambda(2 - lambda)
    CHECK(lam * lam.inverse() == f->one());
}

TEST_CASE("unit inverse roundtrip is exact") {
    auto f = field_for(kTri);
    FieldElement x = el(f, {3, -7, 2}, 5);
    CHECK(x.mul_lambda_inv().mul_lambda() == x);
    CHECK(x.mul_lambda().mul_lambda_inv() == x);
}

TEST_CASE("star map: Fibonacci conjugate") {
    auto f = field_for(kFib);
    Eigen::VectorXd s = f->star_map(f->lambda_element());
    REQUIRE(s.size() == 1);
    double sigma = 1.0 - (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(s(0) == doctest::Approx(sigma).epsilon(1e-12));
    CHECK(f->star_map(f->zero()).norm() == 0.0);
}

TEST_CASE("star map: Tribonacci complex coordinates") {
    auto f = field_for(kTri);
    Eigen::VectorXd s = f->star_map(f->lambda_element());
    REQUIRE(s.size() == 2);
    double lam = f->lambda();
    CHECK(s(0) == doctest::Approx((1 - lam) / 2).epsilon(1e-12)); // Re(alpha)
    CHECK(s(1) > 0);                                              // positive-imag representative
    double mod2 = s.squaredNorm();
    CHECK(mod2 == doctest::Approx(1.0 / lam).epsilon(1e-12)); // |alpha|^2 = 1/lambda
}

TEST_CASE("star map is a ring homomorphism per conjugate") {
    auto f = field_for(kTri);
    FieldElement x = el(f, {1, -2, 3}, 7);
    FieldElement y = el(f, {-4, 5, 1}, 3);
    Eigen::VectorXd sx = f->star_map(x), sy = f->star_map(y);
    Eigen::VectorXd ssum = f->star_map(x + y);
    CHECK((ssum - (sx + sy)).cwiseAbs().maxCoeff() < 1e-10);
    // Multiplication acts per complex pair.
    std::complex<double> cx(sx(0), sx(1)), cy(sy(0), sy(1));
    Eigen::VectorXd sprod = f->star_map(x * y);
    std::complex<double> cprod(sprod(0), sprod(1));
    CHECK(std::abs(cprod - cx * cy) < 1e-10);
}

TEST_CASE("contraction Q represents multiplication by lambda internally") {
    for (const char* text : {kFib, kTri, kPisa4}) {
        auto f = field_for(text);
        FieldElement x = el(f, std::vector<long>(static_cast<size_t>(f->degree()), 3), 11);
        Eigen::VectorXd lhs = f->star_map(x.mul_lambda());
        Eigen::VectorXd rhs = f->contraction() * f->star_map(x);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("embedding: dual basis matrix and determinants") {
    for (const char* text : {kFib, kTri, kPisa4}) {
        auto f = field_for(text);
        const int d = f->degree();
        Eigen::MatrixXd prod = f->basis_matrix().transpose() * f->dual_basis_matrix();
        CHECK((prod - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        double dets = std::abs(f->basis_matrix().determinant()) * std::abs(f->dual_basis_matrix().determinant());
        CHECK(dets == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("embedding: Tribonacci det(B) = sqrt(11)") {
    auto f = field_for(kTri);
    CHECK(std::abs(f->det_basis()) == doctest::Approx(std::sqrt(11.0)).epsilon(1e-10));
}

TEST_CASE("contraction radius: Fibonacci tau - 1") {
    auto f = field_for(kFib);
    CHECK(f->contraction_radius() == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0 - 1.0).epsilon(1e-12));
    CHECK(f->contraction_radius() < 1.0);
    // Q is normal.
    auto ft = field_for(kPisa4);
    Eigen::MatrixXd q = ft->contraction();
    CHECK((q.transpose() * q - q * q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace: Pisa d=4 values") {
    auto f = field_for(kPisa4);
    CHECK(f->trace(f->one()) == Rat(4));
    FieldElement x = f->lambda_element();
    CHECK(f->trace(x) == Rat(1)); // 2^1 - 1
    CHECK(f->trace(x * x) == Rat(3));
    CHECK(f->trace(x * x * x) == Rat(7));
    CHECK(f->trace(f->zero()) == Rat(0));
}

TEST_CASE("Fourier module generator: exact values") {
    auto fib = field_for(kFib);
    CHECK(fib->fourier_generator() == el(fib, {-1, 2}, 5)); // 1/(2 lambda - 1)
    auto tri = field_for(kTri);
    CHECK(tri->fourier_generator() * el(tri, {-1, -2, 3}) == tri->one()); // 1/(3L^2 - 2L - 1)
    auto p4 = field_for(kPisa4);
    CHECK(p4->fourier_generator() == el(p4, {10, 157, -103, 16}, 563));
    // Pisa general formula theta = (d L^{d-1} - sum (m+1) L^m)^{-1}.
    FieldElement denom = el(p4, {-1, -2, -3, 4});
    CHECK(p4->fourier_generator() * denom == p4->one());
}

TEST_CASE("trace criterion: tr(theta L^i L^j) integral") {
    for (const char* text : {kFib, kTri, kPisa4}) {
        auto f = field_for(text);
        const int d = f->degree();
        FieldElement theta = f->fourier_generator();
        FieldElement li = theta;
        for (int i = 0; i < d; ++i) {
            FieldElement lij = li;
            for (int j = 0; j < d; ++j) {
                Rat t = f->trace(lij);
                CHECK(t.get_den() == 1);
                lij = lij.mul_lambda();
            }
            li = li.mul_lambda();
        }
    }
}

TEST_CASE("dual power basis: last element is theta, first row of B* matches") {
    for (const char* text : {kFib, kTri, kPisa4}) {
        auto f = field_for(text);
        const auto& dual = f->dual_power_basis();
        CHECK(dual.back() == f->fourier_generator());
        for (int i = 0; i < f->degree(); ++i)
            CHECK(std::abs(dual[static_cast<size_t>(i)].real_value() - f->dual_basis_matrix()(0, i)) < 1e-8);
    }
}

TEST_CASE("miller_to_k: zero tuple and Fibonacci generator") {
    auto fib = field_for(kFib);
    FieldElement z = fib->miller_element({0, 0});
    CHECK(z.is_zero());
    FieldElement k = fib->miller_element({1, 0});
    CHECK(k.real_value() == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("miller_to_k: Tribonacci (1,0,0) star map matches the closed form") {
    auto tri = field_for(kTri);
    double lam = tri->lambda();
    FieldElement k = tri->miller_element({1, 0, 0});
    Eigen::VectorXd ks = tri->star_map(k);
    double first = (-1 - 9 * lam + 4 * lam * lam) / 44.0;
    double second = (-1 + 3 * lam) / (4 * std::sqrt(11.0));
    CHECK(ks(0) == doctest::Approx(first).epsilon(1e-9));
    CHECK(ks(1) == doctest::Approx(second).epsilon(1e-9));
}

TEST_CASE("smith normal form") {
    std::vector<std::vector<Int>> a = {{Int(2), Int(4)}, {Int(6), Int(8)}};
    auto inv = smith_invariant_factors(a);
    REQUIRE(inv.size() == 2);
    CHECK(inv[0] == 2);
    CHECK(inv[1] == 4);
    std::vector<std::vector<Int>> id = {{Int(1), Int(0)}, {Int(0), Int(1)}};
    auto inv2 = smith_invariant_factors(id);
    CHECK(inv2[0] == 1);
    CHECK(inv2[1] == 1);
    // Rank-deficient.
    std::vector<std::vector<Int>> r1 = {{Int(2), Int(4)}, {Int(1), Int(2)}};
    auto inv3 = smith_invariant_factors(r1);
    REQUIRE(inv3.size() == 1);
    CHECK(inv3[0] == 1);
}

TEST_CASE("field_kernel: exact PF eigenvector of the Fibonacci matrix") {
    RuleFile rf = parse_rule(kFib);
    auto f = field_for(kFib);
    auto v = exact_right_eigenvector(rf.rule, f);
    // v = (1/lambda, 1/lambda^2), normalised to <1|v> = 1.
    CHECK(v[0] == f->one().mul_lambda_inv());
    CHECK(v[1] == f->one().mul_lambda_inv().mul_lambda_inv());
}

TEST_CASE("degree-1 systems are rejected as non-PV units") {
    RuleFile rf = parse_rule("a -> aa");
    IntMatrix m = substitution_matrix(rf.rule);
    PFData pf = pf_eigendata(m);
    CHECK(pf.lambda == doctest::Approx(2.0));
    CHECK_THROWS_AS(minimal_polynomial(char_poly(m), pf.lambda), ValidationError);
}
