#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "substitution.hpp"

#include <cmath>
#include <set>

using namespace spectra;

namespace {

struct Built {
    SubstitutionRule rule;
    FieldPtr field;
    std::vector<FieldElement> lengths;
    Displacement disp;
    PFData pf;
};

Built build(const std::string& text) {
    Built b;
    RuleFile rf = parse_rule(text);
    b.rule = rf.rule;
    IntMatrix m = substitution_matrix(b.rule);
    b.pf = pf_eigendata(m);
    b.field = NumberField::create(minimal_polynomial(char_poly(m), b.pf.lambda));
    NaturalLengths nl = natural_lengths(b.rule, b.field);
    b.lengths = nl.lengths;
    b.disp = displacement_matrix(b.rule, b.lengths);
    return b;
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
const char* kRhoPrime = "A -> AB ; B -> D ; C -> CA ; D -> C";
const char* kRhoTilde = "0 -> 12 ; 1 -> 13 ; 2 -> 1 ; 3 -> 0";

} // namespace

TEST_CASE("parse_rule: Fibonacci and Tribonacci") {
    RuleFile rf = parse_rule(kFib);
    CHECK(rf.rule.alphabet_size == 2);
    CHECK(rf.rule.letters == std::vector<std::string>{"a", "b"});
    CHECK(rf.rule.images[0] == std::vector<int>{0, 1});
    CHECK(rf.rule.images[1] == std::vector<int>{0});

    RuleFile rt = parse_rule(kTri);
    CHECK(rt.rule.alphabet_size == 3);
    CHECK(rt.rule.images[1] == std::vector<int>{0, 2});
}

TEST_CASE("parse_rule: comments, newlines, name and lengths override") {
    RuleFile rf = parse_rule("# Fibonacci variant\nname: fib\na -> ab\nb -> a\nlengths: L, 1\n");
    CHECK(rf.rule.name == "fib");
    REQUIRE(rf.length_override.has_value());
    REQUIRE(rf.length_override->size() == 2);
    CHECK((*rf.length_override)[0] == std::vector<Int>{Int(0), Int(1)});
    CHECK((*rf.length_override)[1] == std::vector<Int>{Int(1)});
    RuleFile rx = parse_rule("a -> ab ; b -> a ; lengths: L^2 - L, 2L + 1");
    CHECK((*rx.length_override)[0] == std::vector<Int>{Int(0), Int(-1), Int(1)});
    CHECK((*rx.length_override)[1] == std::vector<Int>{Int(1), Int(2)});
}

TEST_CASE("parse_rule: errors carry positions") {
    CHECK_THROWS_WITH_AS(parse_rule("a -> "), doctest::Contains("empty image"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_rule("a -> ab ; b -> az"), doctest::Contains("unknown letter 'z'"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_rule("a -> a ; b -> a"), doctest::Contains("dead letter"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_rule("a -> ab ; a -> a ; b -> a"), doctest::Contains("duplicate"), ValidationError);
    CHECK_THROWS_AS(parse_rule("a b"), ValidationError);
    CHECK_THROWS_AS(parse_rule(""), ValidationError);
}

TEST_CASE("parse_rule: unicode letters are single codepoints") {
    RuleFile rf = parse_rule("a -> a\xc4\x81 ; \xc4\x81 -> a"); // U+0101
    CHECK(rf.rule.alphabet_size == 2);
    CHECK(rf.rule.images[0].size() == 2);
}

TEST_CASE("substitution_matrix values") {
    IntMatrix mf = substitution_matrix(parse_rule(kFib).rule);
    CHECK(mf(0, 0) == 1);
    CHECK(mf(0, 1) == 1);
    CHECK(mf(1, 0) == 1);
    CHECK(mf(1, 1) == 0);

    IntMatrix mp = substitution_matrix(parse_rule(kPisa4).rule);
    for (int j = 0; j < 4; ++j) CHECK(mp(0, j) == 1);
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(mp(i, j) == ((j == i - 1) ? 1 : 0));

    IntMatrix m1 = substitution_matrix(parse_rule("a -> a").rule);
    CHECK(m1(0, 0) == 1);

    // Column sums equal image lengths.
    const auto rule = parse_rule(kTri).rule;
    IntMatrix mt = substitution_matrix(rule);
    for (int j = 0; j < 3; ++j) {
        std::int64_t s = 0;
        for (int i = 0; i < 3; ++i) s += mt(i, j);
        CHECK(s == static_cast<std::int64_t>(rule.images[static_cast<size_t>(j)].size()));
    }
}

TEST_CASE("is_primitive") {
    CHECK(is_primitive(substitution_matrix(parse_rule(kFib).rule)));
    IntMatrix id = IntMatrix::Identity(2, 2);
    CHECK(!is_primitive(id));
    IntMatrix mt = substitution_matrix(parse_rule(kTwistedExt).rule);
    CHECK(is_primitive(mt));
    // Spec example: the 5th power is entrywise positive.
    IntMatrix p = mt;
    for (int k = 1; k < 5; ++k) p = (p * mt).eval();
    CHECK((p.array() > 0).all());
    // Irreducible but periodic: swap matrix.
    IntMatrix sw(2, 2);
    sw << 0, 1, 1, 0;
    CHECK(!is_primitive(sw));
}

TEST_CASE("pf_eigendata: paper constants and normalisation") {
    PFData f = pf_eigendata(substitution_matrix(parse_rule(kFib).rule));
    CHECK(f.lambda == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    PFData t = pf_eigendata(substitution_matrix(parse_rule(kTri).rule));
    CHECK(t.lambda == doctest::Approx(1.839287).epsilon(1e-6));
    PFData p4 = pf_eigendata(substitution_matrix(parse_rule(kPisa4).rule));
    CHECK(p4.lambda == doctest::Approx(1.927562).epsilon(1e-6));

    CHECK(t.v.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.u.dot(t.v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.residual < 1e-12);
    // P is a rank-1 projector.
    CHECK((t.P * t.P - t.P).cwiseAbs().maxCoeff() < 1e-12);

    IntMatrix id = IntMatrix::Identity(2, 2);
    CHECK_THROWS_AS(pf_eigendata(id), ValidationError);
}

TEST_CASE("projector limit: ||lambda^-n M^n - P||_max small at n = 40") {
    for (const char* text : {kFib, kTri, kPisa4, kTwistedExt, kRhoPrime, kRhoTilde}) {
        IntMatrix m = substitution_matrix(parse_rule(text).rule);
        PFData pf = pf_eigendata(m);
        Eigen::MatrixXd md = m.cast<double>();
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m.rows(), m.cols());
        double prev = 1e300;
        for (int n = 1; n <= 40; ++n) {
            power = power * md;
            double err = (power / std::pow(pf.lambda, n) - pf.P).cwiseAbs().maxCoeff();
            if (n % 10 == 0) {
                CHECK(err < prev * 1.0001);
                prev = err;
            }
        }
        CHECK((power / std::pow(pf.lambda, 40) - pf.P).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("natural_lengths: canonical paper values") {
    auto fib = build(kFib);
    CHECK(fib.lengths[0] == fib.field->lambda_element());
    CHECK(fib.lengths[1] == fib.field->one());

    auto tri = build(kTri);
    CHECK(tri.lengths[0] == tri.field->lambda_element());
    CHECK(tri.lengths[1] == el(tri.field, {0, -1, 1}));
    CHECK(tri.lengths[2] == tri.field->one());

    auto p4 = build(kPisa4);
    CHECK(p4.lengths[0] == p4.field->lambda_element());
    CHECK(p4.lengths[1] == el(p4.field, {0, -1, 1, 0}));
    CHECK(p4.lengths[2] == el(p4.field, {0, -1, -1, 1}));
    CHECK(p4.lengths[3] == p4.field->one());

    auto rp = build(kRhoPrime);
    CHECK(rp.lengths[0] == rp.field->lambda_element());            // tau
    CHECK(rp.lengths[1] == rp.field->one());                       // 1
    CHECK(rp.lengths[2] == el(rp.field, {1, 1}));                  // tau + 1
    CHECK(rp.lengths[3] == rp.field->lambda_element());            // tau

    auto rt = build(kRhoTilde);
    CHECK(rt.lengths[0] == rt.field->lambda_element());
    CHECK(rt.lengths[1] == rt.field->lambda_element());
    CHECK(rt.lengths[2] == rt.field->one());
    CHECK(rt.lengths[3] == rt.field->one());

    auto tw = build(kTwistedExt);
    CHECK(tw.lengths[0] == tw.field->lambda_element());
    CHECK(tw.lengths[1] == tw.field->lambda_element());
    CHECK(tw.lengths[2] == tw.field->one());
    CHECK(tw.lengths[3] == tw.field->one());
}

TEST_CASE("displacement_matrix: Fibonacci and Tribonacci layouts") {
    auto fib = build(kFib);
    CHECK(fib.disp.entry[0][0].size() == 1);
    CHECK(fib.disp.entry[0][0][0].is_zero());
    CHECK(fib.disp.entry[0][1].size() == 1);
    CHECK(fib.disp.entry[0][1][0].is_zero());
    REQUIRE(fib.disp.entry[1][0].size() == 1);
    CHECK(fib.disp.entry[1][0][0] == fib.field->lambda_element()); // b at offset tau in rho(a)
    CHECK(fib.disp.entry[1][1].empty());

    auto tri = build(kTri);
    REQUIRE(tri.disp.entry[1][0].size() == 1);
    CHECK(tri.disp.entry[1][0][0] == tri.field->lambda_element());

    // Entry cardinalities match the substitution matrix.
    IntMatrix m = substitution_matrix(tri.rule);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(static_cast<std::int64_t>(tri.disp.entry[static_cast<size_t>(i)][static_cast<size_t>(j)].size()) ==
                  m(i, j));
}

TEST_CASE("displacement_matrix: tiling identity rejects non-PF lengths") {
    auto fib = build(kFib);
    std::vector<FieldElement> bad = {fib.field->one(), fib.field->one()};
    CHECK_THROWS_WITH_AS(displacement_matrix(fib.rule, bad), doctest::Contains("tiling identity"), ValidationError);
}

TEST_CASE("rho_tilde displacement reproduces the paper's window equation system") {
    // W0 = sigma W3, W1 = sigma(W0 u W1 u W2), W2 = sigma W0 + sigma, W3 = sigma W1 + sigma.
    auto rt = build(kRhoTilde);
    CHECK(rt.disp.entry[0][3].size() == 1); // letter 0 appears only in rho(3), offset 0
    CHECK(rt.disp.entry[0][3][0].is_zero());
    CHECK(rt.disp.entry[1][0].size() == 1);
    CHECK(rt.disp.entry[1][1].size() == 1);
    CHECK(rt.disp.entry[1][2].size() == 1);
    CHECK(rt.disp.entry[1][0][0].is_zero());
    CHECK(rt.disp.entry[2][0].size() == 1);
    CHECK(rt.disp.entry[2][0][0] == rt.field->lambda_element()); // 2 at offset tau in rho(0)
    CHECK(rt.disp.entry[3][1].size() == 1);
    CHECK(rt.disp.entry[3][1][0] == rt.field->lambda_element());
}

TEST_CASE("find_fixed_power_and_seed") {
    auto fib = parse_rule(kFib).rule;
    FixedSeed fs = find_fixed_power_and_seed(fib);
    CHECK(fs.power == 2);
    CHECK(fs.seed.left == 0);
    CHECK(fs.seed.right == 0);

    auto tri = parse_rule(kTri).rule;
    FixedSeed ft = find_fixed_power_and_seed(tri);
    CHECK(ft.power >= 1);
    CHECK(ft.power <= 9);
    // Verify the fixed-point property directly on words.
    auto w_left = substitute_word(tri, ft.seed.left, ft.power);
    auto w_right = substitute_word(tri, ft.seed.right, ft.power);
    CHECK(w_left.back() == ft.seed.left);
    CHECK(w_right.front() == ft.seed.right);
    CHECK(seed_is_legal(tri, ft.seed));

    auto rt = parse_rule(kRhoTilde).rule;
    FixedSeed fr = find_fixed_power_and_seed(rt);
    auto rl = substitute_word(rt, fr.seed.left, fr.power);
    auto rr = substitute_word(rt, fr.seed.right, fr.power);
    CHECK(rl.back() == fr.seed.left);
    CHECK(rr.front() == fr.seed.right);
}

TEST_CASE("iterate_patch: Fibonacci seed a|a") {
    auto fib = build(kFib);
    Seed seed{0, 0};
    TypedPointSet p0 = iterate_patch(fib.rule, fib.disp, fib.field, seed, 0);
    CHECK(p0.total_points() == 2);

    TypedPointSet p2 = iterate_patch(fib.rule, fib.disp, fib.field, seed, 2);
    CHECK(p2.total_points() == 6); // |rho^2(a)| = 3 letters twice
    CHECK(p2.points[0].size() == 4);
    CHECK(p2.points[1].size() == 2);

    // Illegal seed b|b ("bb" is not a factor).
    CHECK_THROWS_WITH_AS(iterate_patch(fib.rule, fib.disp, fib.field, Seed{1, 1}, 1), doctest::Contains("illegal seed"),
                         ValidationError);
}

TEST_CASE("iterate_patch: counts follow M^n") {
    auto tri = build(kTri);
    FixedSeed fs = find_fixed_power_and_seed(tri.rule);
    TypedPointSet p = iterate_patch(tri.rule, tri.disp, tri.field, fs.seed, 10);
    IntMatrix m = substitution_matrix(tri.rule);
    IntMatrix mp = IntMatrix::Identity(3, 3);
    for (int k = 0; k < 10; ++k) mp = (mp * m).eval();
    Eigen::Vector<std::int64_t, Eigen::Dynamic> seedcnt = Eigen::Vector<std::int64_t, Eigen::Dynamic>::Zero(3);
    seedcnt(fs.seed.left) += 1;
    seedcnt(fs.seed.right) += 1;
    Eigen::Vector<std::int64_t, Eigen::Dynamic> expect = mp * seedcnt;
    for (int i = 0; i < 3; ++i) CHECK(static_cast<std::int64_t>(p.points[static_cast<size_t>(i)].size()) == expect(i));
}

TEST_CASE("patch nesting and frequency convergence") {
    auto fib = build(kFib);
    FixedSeed fs = find_fixed_power_and_seed(fib.rule);
    TypedPointSet small = iterate_patch(fib.rule, fib.disp, fib.field, fs.seed, fs.power * 3);
    TypedPointSet big = iterate_patch(fib.rule, fib.disp, fib.field, fs.seed, fs.power * 4);
    // Every point of the smaller patch appears in the larger one.
    for (int i = 0; i < 2; ++i) {
        std::set<PointCoord> bigset(big.points[static_cast<size_t>(i)].begin(), big.points[static_cast<size_t>(i)].end());
        for (const auto& pt : small.points[static_cast<size_t>(i)]) CHECK(bigset.count(pt) == 1);
    }
    // Per-letter frequencies approach v.
    TypedPointSet huge = patch_to_radius(fib.rule, fib.disp, fib.field, fs.seed, fs.power, 2e5);
    CHECK(huge.total_points() >= 100000);
    double total = static_cast<double>(huge.total_points());
    for (int i = 0; i < 2; ++i)
        CHECK(std::abs(static_cast<double>(huge.points[static_cast<size_t>(i)].size()) / total - fib.pf.v(i)) < 1e-4);
    // Points are sorted and within-letter disjoint.
    for (const auto& pts : huge.points)
        for (size_t k = 0; k + 1 < pts.size(); ++k) {
            CHECK(fib.field->real_value_int(pts[k]) < fib.field->real_value_int(pts[k + 1]));
            CHECK(pts[k] != pts[k + 1]);
        }
}

TEST_CASE("displacement positions generate the full module (Smith check passes implicitly)") {
    for (const char* text : {kFib, kTri, kPisa4, kRhoPrime, kRhoTilde, kTwistedExt}) {
        auto b = build(text);
        CHECK(b.lengths.size() == static_cast<size_t>(b.rule.alphabet_size));
        for (const auto& l : b.lengths) CHECK(l.is_integral());
    }
}
