#include "substitution.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace spectra {

namespace {

struct Token {
    std::string text; // one UTF-8 codepoint
    int line = 0;
    int col = 0;
};

// Decode UTF-8 into codepoint tokens with 1-based line/column positions.
std::vector<Token> decode_utf8(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    while (i < text.size()) {
        unsigned char b = static_cast<unsigned char>(text[i]);
        size_t len = 1;
        if (b >= 0xF0)
            len = 4;
        else if (b >= 0xE0)
            len = 3;
        else if (b >= 0xC0)
            len = 2;
        else if (b >= 0x80) {
            std::ostringstream os;
            os << "invalid UTF-8 byte at line " << line << ", column " << col;
            throw ValidationError(os.str());
        }
        if (i + len > text.size()) throw ValidationError("truncated UTF-8 sequence at end of input");
        out.push_back({text.substr(i, len), line, col});
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        i += len;
    }
    return out;
}

[[noreturn]] void syntax_error(const std::string& what, int line, int col) {
    std::ostringstream os;
    os << "syntax error: " << what << " (line " << line << ", column " << col << ")";
    throw ValidationError(os.str());
}

bool is_space(const std::string& cp) {
    return cp == " " || cp == "\t" || cp == "\r" || cp == "\n";
}

// Integer polynomial in L, e.g. "L^2 - L", "2L + 1", "1".
std::vector<Int> parse_length_expr(const std::vector<Token>& toks, size_t begin, size_t end) {
    std::vector<Int> coeffs(16, Int(0));
    size_t i = begin;
    auto skip_ws = [&] {
        while (i < end && is_space(toks[i].text)) ++i;
    };
    skip_ws();
    if (i >= end) syntax_error("empty length expression", toks[begin > 0 ? begin - 1 : 0].line, toks[begin > 0 ? begin - 1 : 0].col);
    bool expect_term = true;
    int sign = 1;
    while (true) {
        skip_ws();
        if (i >= end) break;
        const std::string& t = toks[i].text;
        if (t == "+" || t == "-") {
            if (expect_term && t == "-") {
                sign = -sign;
                ++i;
                continue;
            }
            if (expect_term) {
                ++i;
                continue;
            }
            sign = (t == "-") ? -1 : 1;
            expect_term = true;
            ++i;
            continue;
        }
        if (!expect_term) syntax_error("expected '+' or '-' between terms", toks[i].line, toks[i].col);
        Int coef = 1;
        int expo = 0;
        bool saw_number = false, saw_l = false;
        if (t[0] >= '0' && t[0] <= '9') {
            std::string num;
            while (i < end && toks[i].text.size() == 1 && toks[i].text[0] >= '0' && toks[i].text[0] <= '9') {
                num += toks[i].text;
                ++i;
            }
            coef = Int(num);
            saw_number = true;
            skip_ws();
            if (i < end && toks[i].text == "*") {
                ++i;
                skip_ws();
            }
        }
        if (i < end && (toks[i].text == "L" || toks[i].text == "l")) {
            saw_l = true;
            expo = 1;
            ++i;
            skip_ws();
            if (i < end && toks[i].text == "^") {
                ++i;
                skip_ws();
                if (i >= end || !(toks[i].text.size() == 1 && toks[i].text[0] >= '0' && toks[i].text[0] <= '9'))
                    syntax_error("expected exponent after '^'", toks[i < end ? i : end - 1].line, toks[i < end ? i : end - 1].col);
                std::string num;
                while (i < end && toks[i].text.size() == 1 && toks[i].text[0] >= '0' && toks[i].text[0] <= '9') {
                    num += toks[i].text;
                    ++i;
                }
                expo = std::stoi(num);
                if (expo >= static_cast<int>(coeffs.size())) syntax_error("exponent too large", toks[i - 1].line, toks[i - 1].col);
            }
        }
        if (!saw_number && !saw_l) syntax_error("expected number or 'L' in length expression", toks[i].line, toks[i].col);
        coeffs[static_cast<size_t>(expo)] += sign * coef;
        sign = 1;
        expect_term = false;
    }
    if (expect_term) syntax_error("dangling sign in length expression", toks[end - 1].line, toks[end - 1].col);
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

bool reserved_letter(const std::string& cp) {
    static const std::set<std::string> reserved = {"-", ">", ";", ":", "#", ",", "^", "+", "*"};
    return reserved.count(cp) > 0;
}

} // namespace

std::string SubstitutionRule::word_string(const std::vector<int>& w) const {
    std::string s;
    for (int x : w) s += letters[static_cast<size_t>(x)];
    return s;
}

RuleFile parse_rule(const std::string& text) {
    // Strip comments: '#' to end of line.
    std::string stripped;
    bool in_comment = false;
    for (char ch : text) {
        if (ch == '#') in_comment = true;
        if (ch == '\n') in_comment = false;
        stripped += in_comment ? (ch == '\n' ? '\n' : ' ') : ch;
    }
    auto toks = decode_utf8(stripped);

    // Split into clauses at ';' and newlines.
    std::vector<std::pair<size_t, size_t>> clauses;
    size_t start = 0;
    for (size_t i = 0; i <= toks.size(); ++i) {
        if (i == toks.size() || toks[i].text == ";" || toks[i].text == "\n") {
            if (i > start) clauses.push_back({start, i});
            start = i + 1;
        }
    }

    RuleFile out;
    std::map<std::string, int> letter_index;
    std::vector<std::vector<Token>> image_tokens;
    std::vector<std::pair<size_t, size_t>> pending_lengths;
    for (auto [b, e] : clauses) {
        size_t i = b;
        while (i < e && is_space(toks[i].text)) ++i;
        if (i >= e) continue;

        // Keyword clauses.
        auto keyword = [&](const std::string& kw) -> std::optional<size_t> {
            size_t j = i;
            for (char c : kw) {
                if (j >= e || toks[j].text != std::string(1, c)) return std::nullopt;
                ++j;
            }
            while (j < e && is_space(toks[j].text)) ++j;
            if (j >= e || toks[j].text != ":") return std::nullopt;
            return j + 1;
        };
        if (auto after = keyword("lengths")) {
            size_t p = *after;
            size_t seg = p;
            for (size_t j = p; j <= e; ++j) {
                if (j == e || toks[j].text == ",") {
                    pending_lengths.push_back({seg, j});
                    seg = j + 1;
                }
            }
            continue;
        }
        if (auto after = keyword("name")) {
            std::string nm;
            for (size_t j = *after; j < e; ++j) nm += toks[j].text;
            while (!nm.empty() && (nm.front() == ' ' || nm.front() == '\t')) nm.erase(nm.begin());
            while (!nm.empty() && (nm.back() == ' ' || nm.back() == '\t')) nm.pop_back();
            if (!nm.empty()) out.rule.name = nm;
            continue;
        }

        // Rule clause: letter -> letters
        if (reserved_letter(toks[i].text)) syntax_error("expected a letter", toks[i].line, toks[i].col);
        Token lhs = toks[i];
        ++i;
        while (i < e && is_space(toks[i].text)) ++i;
        if (i + 1 >= e || toks[i].text != "-" || toks[i + 1].text != ">")
            syntax_error("expected '->' after letter '" + lhs.text + "'", lhs.line, lhs.col);
        i += 2;
        std::vector<Token> img;
        for (; i < e; ++i) {
            if (is_space(toks[i].text)) continue;
            if (reserved_letter(toks[i].text)) syntax_error("unexpected '" + toks[i].text + "' in image", toks[i].line, toks[i].col);
            img.push_back(toks[i]);
        }
        if (img.empty()) syntax_error("empty image for letter '" + lhs.text + "'", lhs.line, lhs.col);
        if (letter_index.count(lhs.text))
            syntax_error("duplicate rule for letter '" + lhs.text + "'", lhs.line, lhs.col);
        letter_index[lhs.text] = static_cast<int>(out.rule.letters.size());
        out.rule.letters.push_back(lhs.text);
        image_tokens.push_back(std::move(img));
    }

    if (out.rule.letters.empty()) throw ValidationError("syntax error: no substitution rules found");
    out.rule.alphabet_size = static_cast<int>(out.rule.letters.size());
    for (const auto& img : image_tokens) {
        std::vector<int> w;
        for (const auto& t : img) {
            auto it = letter_index.find(t.text);
            if (it == letter_index.end()) syntax_error("unknown letter '" + t.text + "'", t.line, t.col);
            w.push_back(it->second);
        }
        out.rule.images.push_back(std::move(w));
    }

    // No dead letters: every letter occurs in at least one image.
    std::vector<bool> seen(static_cast<size_t>(out.rule.alphabet_size), false);
    for (const auto& w : out.rule.images)
        for (int x : w) seen[static_cast<size_t>(x)] = true;
    for (int i = 0; i < out.rule.alphabet_size; ++i)
        if (!seen[static_cast<size_t>(i)])
            throw ValidationError("dead letter '" + out.rule.letter(i) + "': it occurs in no image");

    if (!pending_lengths.empty()) {
        std::vector<std::vector<Int>> le;
        for (auto [b, e] : pending_lengths) le.push_back(parse_length_expr(toks, b, e));
        if (static_cast<int>(le.size()) != out.rule.alphabet_size)
            throw ValidationError("lengths override must list one expression per letter");
        out.length_override = std::move(le);
    }
    return out;
}

IntMatrix substitution_matrix(const SubstitutionRule& rule) {
    const int n = rule.alphabet_size;
    IntMatrix m = IntMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int x : rule.images[static_cast<size_t>(j)]) m(x, j) += 1;
    return m;
}

bool is_primitive(const IntMatrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0 || m.cols() != n) return false;
    using BoolMat = std::vector<std::vector<bool>>;
    BoolMat a(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j) > 0;
    auto all_positive = [&](const BoolMat& x) {
        for (const auto& row : x)
            for (bool b : row)
                if (!b) return false;
        return true;
    };
    const int cap = std::max(1, n * n - 2 * n + 2); // Wielandt bound
    BoolMat p = a;
    for (int k = 1; k <= cap; ++k) {
        if (all_positive(p)) return true;
        BoolMat next(static_cast<size_t>(n), std::vector<bool>(static_cast<size_t>(n), false));
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l)
                if (p[static_cast<size_t>(i)][static_cast<size_t>(l)])
                    for (int j = 0; j < n; ++j)
                        if (a[static_cast<size_t>(l)][static_cast<size_t>(j)]) next[static_cast<size_t>(i)][static_cast<size_t>(j)] = true;
        p = std::move(next);
    }
    return all_positive(p);
}

PFData pf_eigendata(const IntMatrix& m, double tol) {
    if (!is_primitive(m)) throw ValidationError("pf_eigendata: matrix is not primitive");
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd md(n, n), mt(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            md(i, j) = static_cast<double>(m(i, j));
            mt(j, i) = md(i, j);
        }

    auto power_iterate = [&](const Eigen::MatrixXd& a) {
        Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
        for (int it = 0; it < 100000; ++it) {
            Eigen::VectorXd y = a * x;
            y /= y.sum();
            double delta = (y - x).cwiseAbs().maxCoeff();
            x = y;
            if (delta < 1e-16) break;
        }
        return x;
    };

    Eigen::VectorXd v = power_iterate(md);
    Eigen::VectorXd u = power_iterate(mt);

    // Newton polish of lambda on the characteristic polynomial.
    IntPoly p = char_poly(m);
    long double lam = (md * v).sum();
    {
        std::vector<long double> cl(p.c.size()), dl(p.c.size() - 1);
        for (size_t i = 0; i < p.c.size(); ++i)
            cl[i] = p.c[i].fits_slong_p() ? static_cast<long double>(p.c[i].get_si())
                                          : strtold(p.c[i].get_str().c_str(), nullptr);
        for (size_t i = 1; i < p.c.size(); ++i) dl[i - 1] = static_cast<long double>(i) * cl[i];
        for (int it = 0; it < 200; ++it) {
            long double f = 0, df = 0;
            for (auto r = cl.rbegin(); r != cl.rend(); ++r) f = f * lam + *r;
            for (auto r = dl.rbegin(); r != dl.rend(); ++r) df = df * lam + *r;
            if (df == 0.0L) break;
            long double step = f / df;
            lam -= step;
            if (std::abs(step) < 1e-19L * (std::abs(lam) + 1.0L)) break;
        }
    }

    PFData out;
    out.lambda = static_cast<double>(lam);
    out.v = v / v.sum();
    double uv = u.dot(out.v);
    if (uv == 0) throw ConvergenceError("pf_eigendata: left/right eigenvector normalisation failed");
    out.u = u / uv;
    out.P = out.v * out.u.transpose();

    double r1 = (md * out.v - out.lambda * out.v).cwiseAbs().maxCoeff();
    double r2 = (mt * out.u - out.lambda * out.u).cwiseAbs().maxCoeff();
    double r3 = std::abs(out.u.dot(out.v) - 1.0);
    out.residual = std::max({r1, r2, r3});
    if (out.residual > tol) {
        std::ostringstream os;
        os << "pf_eigendata: residual " << out.residual << " above tolerance " << tol;
        throw ConvergenceError(os.str());
    }
    return out;
}

namespace {

PointCoord to_point(const FieldElement& x) {
    if (!x.is_integral()) throw ValidationError("point coordinates must lie in Z[lambda]");
    PointCoord p{};
    for (int i = 0; i < x.field().degree(); ++i) {
        const Int& num = x.coeff(i).get_num();
        if (!num.fits_slong_p()) throw ConvergenceError("patch coordinate overflow (coefficient exceeds int64)");
        p[static_cast<size_t>(i)] = num.get_si();
    }
    return p;
}

// Smith-form check that the displacement positions generate Z[lambda] as a
// Z[lambda]-module; returns the invariant factors.
std::vector<Int> module_invariants(const Displacement& disp, const FieldPtr& field) {
    const int d = field->degree();
    std::vector<std::vector<Int>> rows;
    for (const auto& per_i : disp.entry)
        for (const auto& cell : per_i)
            for (const auto& t : cell) {
                if (t.is_zero()) continue;
                FieldElement x = t;
                for (int k = 0; k < d; ++k) {
                    std::vector<Int> row(static_cast<size_t>(d));
                    for (int c = 0; c < d; ++c) {
                        if (x.coeff(c).get_den() != 1)
                            throw ValidationError("displacement positions must lie in Z[lambda]");
                        row[static_cast<size_t>(c)] = x.coeff(c).get_num();
                    }
                    rows.push_back(std::move(row));
                    x = x.mul_lambda();
                }
            }
    if (rows.empty()) throw ValidationError("no nonzero displacement positions");
    return smith_invariant_factors(rows);
}

} // namespace

NaturalLengths natural_lengths(const SubstitutionRule& rule, const FieldPtr& field) {
    const IntMatrix m = substitution_matrix(rule);
    const int n = rule.alphabet_size;
    const int d = field->degree();

    // Exact kernel of (M^T - lambda I) over Q(lambda).
    std::vector<std::vector<FieldElement>> a(static_cast<size_t>(n), std::vector<FieldElement>(static_cast<size_t>(n), field->zero()));
    FieldElement lam = field->lambda_element();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] = field->from_int(static_cast<long>(m(j, i)));
            if (i == j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = a[static_cast<size_t>(i)][static_cast<size_t>(j)] - lam;
        }
    std::vector<FieldElement> u = field_kernel(a);

    // Orient positive.
    int negc = 0, posc = 0;
    for (const auto& x : u) (x.real_value() < 0 ? negc : posc)++;
    if (negc == n)
        for (auto& x : u) x = -x;
    else if (negc != 0)
        throw ValidationError("natural_lengths: PF eigenvector has mixed signs (internal)");

    NaturalLengths out;
    for (int attempt = 0; attempt < 4; ++attempt) {
        // Canonical scaling: shortest length 1 when that stays in Z[lambda].
        int min_i = 0;
        for (int i = 1; i < n; ++i)
            if (u[static_cast<size_t>(i)].real_value() < u[static_cast<size_t>(min_i)].real_value()) min_i = i;
        FieldElement inv = u[static_cast<size_t>(min_i)].inverse();
        std::vector<FieldElement> cand;
        bool integral = true;
        for (int i = 0; i < n; ++i) {
            cand.push_back(u[static_cast<size_t>(i)] * inv);
            integral = integral && cand.back().is_integral();
        }
        std::string note = "normalised so the shortest length is 1";
        if (!integral) {
            // Fallback: clear denominators, reduce content.
            Int l = 1;
            for (const auto& x : u)
                for (int c = 0; c < d; ++c) l = lcm(l, x.coeff(c).get_den());
            Int g = 0;
            std::vector<FieldElement> scaled;
            for (const auto& x : u) scaled.push_back(x * Rat(l));
            for (const auto& x : scaled)
                for (int c = 0; c < d; ++c) g = gcd(g, x.coeff(c).get_num());
            cand.clear();
            for (auto& x : scaled) {
                Rat ginv(Int(1), g);
                ginv.canonicalize();
                cand.push_back(x * ginv);
            }
            note = "cleared denominators, content reduced to 1";
        }

        Displacement disp = displacement_matrix(rule, cand);
        auto invf = module_invariants(disp, field);
        bool minimal = static_cast<int>(invf.size()) == d;
        Int index = 1;
        for (const auto& f : invf) index *= f;
        minimal = minimal && index == 1;
        if (minimal) {
            out.lengths = std::move(cand);
            out.scaling_note = note;
            return out;
        }
        // Positions generate a submodule of the given index; rescale and retry.
        if (index == 0) throw ValidationError("natural_lengths: displacement module is degenerate");
        Rat shrink(Int(1), index);
        shrink.canonicalize();
        for (auto& x : u) x = x * shrink;
    }
    throw ValidationError("natural_lengths: no admissible scaling found within search bound");
}

std::vector<FieldElement> exact_right_eigenvector(const SubstitutionRule& rule, const FieldPtr& field) {
    const IntMatrix m = substitution_matrix(rule);
    const int n = rule.alphabet_size;
    std::vector<std::vector<FieldElement>> a(static_cast<size_t>(n), std::vector<FieldElement>(static_cast<size_t>(n), field->zero()));
    FieldElement lam = field->lambda_element();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] = field->from_int(static_cast<long>(m(i, j)));
            if (i == j) a[static_cast<size_t>(i)][static_cast<size_t>(j)] = a[static_cast<size_t>(i)][static_cast<size_t>(j)] - lam;
        }
    std::vector<FieldElement> v = field_kernel(a);
    FieldElement sum = field->zero();
    for (const auto& x : v) sum = sum + x;
    FieldElement inv = sum.inverse();
    for (auto& x : v) x = x * inv;
    for (const auto& x : v)
        if (x.real_value() <= 0) throw ValidationError("exact_right_eigenvector: eigenvector is not positive (internal)");
    return v;
}

Displacement displacement_matrix(const SubstitutionRule& rule, const std::vector<FieldElement>& lengths) {
    const int n = rule.alphabet_size;
    if (static_cast<int>(lengths.size()) != n) throw ValidationError("displacement_matrix: one length per letter required");
    Displacement disp;
    disp.lengths = lengths;
    disp.entry.assign(static_cast<size_t>(n), std::vector<std::vector<FieldElement>>(static_cast<size_t>(n)));
    for (int j = 0; j < n; ++j) {
        FieldElement cursor = lengths[0].field().zero();
        for (int w : rule.images[static_cast<size_t>(j)]) {
            disp.entry[static_cast<size_t>(w)][static_cast<size_t>(j)].push_back(cursor);
            cursor = cursor + lengths[static_cast<size_t>(w)];
        }
        if (cursor != lengths[static_cast<size_t>(j)].mul_lambda())
            throw ValidationError("displacement_matrix: tiling identity violated for letter '" + rule.letter(j) +
                                  "' (lengths are not PF-proportional)");
    }
    return disp;
}

std::size_t TypedPointSet::total_points() const {
    std::size_t s = 0;
    for (const auto& p : points) s += p.size();
    return s;
}

TypedPointSet initial_patch(const Displacement& disp, const FieldPtr& field, Seed seed) {
    const int n = disp.size();
    TypedPointSet ps;
    ps.field = field;
    ps.points.assign(static_cast<size_t>(n), {});
    FieldElement left_len = disp.lengths[static_cast<size_t>(seed.left)];
    PointCoord lp = to_point(-left_len);
    PointCoord rp{};
    ps.points[static_cast<size_t>(seed.left)].push_back(lp);
    ps.points[static_cast<size_t>(seed.right)].push_back(rp);
    if (seed.left == seed.right)
        std::sort(ps.points[static_cast<size_t>(seed.left)].begin(), ps.points[static_cast<size_t>(seed.left)].end(),
                  [&](const PointCoord& a, const PointCoord& b) { return field->real_value_int(a) < field->real_value_int(b); });
    ps.radius = std::min(static_cast<double>(left_len.real_value()),
                         static_cast<double>(disp.lengths[static_cast<size_t>(seed.right)].real_value()));
    return ps;
}

TypedPointSet inflate_patch(const Displacement& disp, const FieldPtr& field, const TypedPointSet& patch) {
    const int n = disp.size();
    const int d = field->degree();
    const auto& lmat = field->lambda_action_int();
    constexpr std::int64_t kCap = std::int64_t{1} << 60;

    // Displacement entries as integer coordinates.
    std::vector<std::vector<std::vector<PointCoord>>> tint(static_cast<size_t>(n),
                                                           std::vector<std::vector<PointCoord>>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& t : disp.entry[static_cast<size_t>(i)][static_cast<size_t>(j)])
                tint[static_cast<size_t>(i)][static_cast<size_t>(j)].push_back(to_point(t));

    TypedPointSet out;
    out.field = field;
    out.points.assign(static_cast<size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        auto& dst = out.points[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const auto& ts = tint[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (ts.empty()) continue;
            for (const auto& p : patch.points[static_cast<size_t>(j)]) {
                PointCoord q{};
                for (int r = 0; r < d; ++r) {
                    __int128 acc = 0;
                    for (int c = 0; c < d; ++c)
                        acc += static_cast<__int128>(lmat[static_cast<size_t>(r)][static_cast<size_t>(c)]) * p[static_cast<size_t>(c)];
                    if (acc > kCap || acc < -kCap) throw ConvergenceError("patch coordinate overflow");
                    q[static_cast<size_t>(r)] = static_cast<std::int64_t>(acc);
                }
                for (const auto& t : ts) {
                    PointCoord w = q;
                    for (int r = 0; r < d; ++r) w[static_cast<size_t>(r)] += t[static_cast<size_t>(r)];
                    dst.push_back(w);
                }
            }
        }
        std::sort(dst.begin(), dst.end(),
                  [&](const PointCoord& a, const PointCoord& b) { return field->real_value_int(a) < field->real_value_int(b); });
    }
    out.radius = patch.radius * field->lambda();
    return out;
}

TypedPointSet iterate_patch(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field, Seed seed, int n) {
    if (n < 0) throw ValidationError("iterate_patch: n must be >= 0");
    if (!seed_is_legal(rule, seed))
        throw ValidationError("iterate_patch: illegal seed " + rule.letter(seed.left) + "|" + rule.letter(seed.right));
    TypedPointSet ps = initial_patch(disp, field, seed);
    for (int k = 0; k < n; ++k) ps = inflate_patch(disp, field, ps);
    return ps;
}

TypedPointSet patch_to_radius(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field, Seed seed,
                              int power, double r) {
    if (power < 1) throw ValidationError("patch_to_radius: power must be >= 1");
    TypedPointSet ps = iterate_patch(rule, disp, field, seed, 0);
    int guard = 0;
    while (ps.radius < r) {
        for (int k = 0; k < power; ++k) ps = inflate_patch(disp, field, ps);
        if (++guard > 200) throw ConvergenceError("patch_to_radius: radius not reached");
    }
    return ps;
}

std::vector<int> substitute_word(const SubstitutionRule& rule, int letter, int n) {
    std::vector<int> w{letter};
    for (int k = 0; k < n; ++k) {
        std::vector<int> next;
        next.reserve(w.size() * 2);
        for (int x : w) {
            const auto& img = rule.images[static_cast<size_t>(x)];
            next.insert(next.end(), img.begin(), img.end());
            if (next.size() > 20'000'000) throw ConvergenceError("substitute_word: expansion too large");
        }
        w = std::move(next);
    }
    return w;
}

namespace {

std::set<std::pair<int, int>> legal_pairs(const SubstitutionRule& rule) {
    std::set<std::pair<int, int>> pairs;
    const int n = rule.alphabet_size;
    for (int a = 0; a < n; ++a) {
        std::vector<int> w{a};
        for (int k = 1; k <= 2 * n; ++k) {
            std::vector<int> next;
            for (int x : w) {
                const auto& img = rule.images[static_cast<size_t>(x)];
                next.insert(next.end(), img.begin(), img.end());
            }
            w = std::move(next);
            for (size_t i = 0; i + 1 < w.size(); ++i) pairs.insert({w[i], w[i + 1]});
            if (w.size() > 1'000'000) break;
        }
    }
    return pairs;
}

} // namespace

bool seed_is_legal(const SubstitutionRule& rule, Seed seed) {
    auto pairs = legal_pairs(rule);
    return pairs.count({seed.left, seed.right}) > 0;
}

FixedSeed find_fixed_power_and_seed(const SubstitutionRule& rule) {
    const int n = rule.alphabet_size;
    auto pairs = legal_pairs(rule);
    std::vector<int> lastmap(static_cast<size_t>(n)), firstmap(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        lastmap[static_cast<size_t>(i)] = rule.images[static_cast<size_t>(i)].back();
        firstmap[static_cast<size_t>(i)] = rule.images[static_cast<size_t>(i)].front();
    }
    std::vector<int> lp(static_cast<size_t>(n)), fp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) lp[static_cast<size_t>(i)] = fp[static_cast<size_t>(i)] = i;
    for (int p = 1; p <= n * n; ++p) {
        for (int i = 0; i < n; ++i) {
            lp[static_cast<size_t>(i)] = lastmap[static_cast<size_t>(lp[static_cast<size_t>(i)])];
            fp[static_cast<size_t>(i)] = firstmap[static_cast<size_t>(fp[static_cast<size_t>(i)])];
        }
        for (int x = 0; x < n; ++x) {
            if (lp[static_cast<size_t>(x)] != x) continue;
            for (int y = 0; y < n; ++y) {
                if (fp[static_cast<size_t>(y)] != y) continue;
                if (pairs.count({x, y})) return {p, {x, y}};
            }
        }
    }
    throw ConvergenceError("find_fixed_power_and_seed: no fixed legal seed within N^2 powers");
}

} // namespace spectra
