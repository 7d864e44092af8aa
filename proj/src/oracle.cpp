#include "oracle.hpp"

#include "errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace spectra {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

double sinc(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

std::complex<double> cis(double phase) {
    return {std::cos(phase), std::sin(phase)};
}

} // namespace

Eigen::VectorXcd brute_fb(const TypedPointSet& patch, double k, double r, int threads) {
    if (patch.radius < r) throw ValidationError("brute_fb: patch radius is smaller than the averaging radius");
    const int n = static_cast<int>(patch.points.size());
    Eigen::VectorXcd out(n);
    const NumberField& field = *patch.field;
    for (int i = 0; i < n; ++i) {
        const auto& pts = patch.points[static_cast<size_t>(i)];
        const int blocks = 64;
        std::vector<std::complex<double>> partial(blocks, {0, 0});
        parallel_blocks(blocks, threads, [&](int b) {
            size_t begin = pts.size() * static_cast<size_t>(b) / blocks;
            size_t end = pts.size() * static_cast<size_t>(b + 1) / blocks;
            std::complex<double> acc(0, 0);
            const long double kl = static_cast<long double>(k);
            for (size_t s = begin; s < end; ++s) {
                long double x = field.real_value_int(pts[s]);
                if (x < -r || x > r) continue;
                long double frac = fmodl(kl * x, 1.0L);
                double phase = static_cast<double>(-2.0L * static_cast<long double>(kPi) * frac);
                acc += cis(phase);
            }
            partial[static_cast<size_t>(b)] = acc;
        });
        std::complex<double> total(0, 0);
        for (const auto& p : partial) total += p;
        out(i) = total / (2.0 * r);
    }
    return out;
}

UniformReport uniform_distribution_test(const TypedPointSet& patch, const FieldPtr& field, const WindowSolution& windows,
                                        int bins) {
    if (bins <= 0) throw ValidationError("uniform_distribution_test: need at least one bin");
    if (windows.internal_dim != 1)
        throw ValidationError("uniform_distribution_test: histogram test implemented for 1D internal space");
    UniformReport rep;
    const int n = static_cast<int>(patch.points.size());
    rep.per_letter.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& pts = patch.points[static_cast<size_t>(i)];
        if (pts.size() < 10000)
            throw ValidationError("uniform_distribution_test: insufficient points for letter '" + std::to_string(i) + "'");
        const IntervalUnion& w = windows.interval_windows[static_cast<size_t>(i)];
        double lo = w.parts.front().lo, hi = w.parts.back().hi;
        double width = (hi - lo) / bins;
        double vol = w.measure();
        std::vector<double> expected(static_cast<size_t>(bins), 0.0);
        for (int b = 0; b < bins; ++b) {
            double a = lo + b * width, c = lo + (b + 1) * width;
            double m = 0;
            for (const auto& p : w.parts) m += std::max(0.0, std::min(c, p.hi) - std::max(a, p.lo));
            expected[static_cast<size_t>(b)] = m / vol * static_cast<double>(pts.size());
        }
        std::vector<double> observed(static_cast<size_t>(bins), 0.0);
        for (const auto& p : pts) {
            double y = field->star_map_int(p)(0);
            int b = static_cast<int>((y - lo) / width);
            b = std::clamp(b, 0, bins - 1);
            observed[static_cast<size_t>(b)] += 1;
        }
        auto& out = rep.per_letter[static_cast<size_t>(i)];
        out.resize(static_cast<size_t>(bins));
        for (int b = 0; b < bins; ++b) {
            auto& ub = out[static_cast<size_t>(b)];
            ub.expected = expected[static_cast<size_t>(b)];
            ub.observed = observed[static_cast<size_t>(b)];
            if (ub.expected > 1e-9) {
                ub.rel_dev = std::abs(ub.observed - ub.expected) / ub.expected;
                rep.max_rel_dev = std::max(rep.max_rel_dev, ub.rel_dev);
            } else if (ub.observed > 0) {
                ub.rel_dev = std::numeric_limits<double>::infinity();
                rep.max_rel_dev = ub.rel_dev;
            }
        }
        rep.points_used += pts.size();
    }
    return rep;
}

std::complex<double> rho_tilde_f1_series(double y) {
    const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
    const double sigma = 1.0 - tau;
    std::complex<double> sum(0, 0);
    double s4n = 1.0; // sigma^{4n}
    for (int n = 0; n < 64; ++n) {
        double s4n1 = s4n * sigma; // sigma^{4n+1}
        if (std::abs(s4n1) < 1e-18) break;
        double phase = -kPi * (2 * sigma + 2 * s4n + s4n1) * y;
        sum += s4n1 * cis(phase) * sinc(kPi * s4n1 * y);
        s4n *= sigma * sigma * sigma * sigma;
    }
    return -sum;
}

std::complex<double> fibonacci_q_recursion(double y, int depth) {
    const double tau = (1.0 + std::sqrt(5.0)) / 2.0;
    const double sigma = 1.0 - tau;
    const double asig = std::abs(sigma);
    const int cols = 2 * depth + 3;
    // q[n][m] = q_n evaluated at sigma^m y.
    std::vector<std::vector<std::complex<double>>> q(2, std::vector<std::complex<double>>(static_cast<size_t>(cols), {asig, 0}));
    std::vector<double> spow(static_cast<size_t>(cols + 2));
    spow[0] = 1;
    for (size_t m = 1; m < spow.size(); ++m) spow[m] = spow[m - 1] * sigma;
    for (int n = 1; n < depth; ++n) {
        std::vector<std::complex<double>> next(static_cast<size_t>(cols), {0, 0});
        for (int m = 0; m + 2 < cols; ++m) {
            double ym2 = spow[static_cast<size_t>(m + 2)] * y;
            next[static_cast<size_t>(m)] = asig * q[1][static_cast<size_t>(m + 1)] +
                                           sigma * sigma * cis(2 * kPi * ym2) * q[0][static_cast<size_t>(m + 2)];
        }
        q[0] = std::move(q[1]);
        q[1] = std::move(next);
    }
    return q[1][0];
}

ClosedFormReport closed_form_check(const std::string& system_id, const FourierMatrixSpec& spec,
                                   const Eigen::VectorXd& pf_v, double eta, const std::vector<double>& grid) {
    ClosedFormReport rep;
    rep.system = system_id;
    rep.grid_points = static_cast<int>(grid.size());
    if (system_id == "fibonacci") {
        const double tau = spec.lambda;
        for (double y : grid) {
            Eigen::VectorXd yv(1);
            yv(0) = y;
            RieszResult rr = riesz_limit(spec, yv, pf_v, 1e-12, 400);
            Eigen::VectorXcd f = window_ft(rr, eta);
            std::complex<double> fa = cis(kPi * y * (2 * tau - 3)) * sinc(kPi * y);
            std::complex<double> fb = cis(kPi * y * (tau - 3)) / tau * sinc(kPi * y / tau);
            rep.max_error = std::max(rep.max_error, std::abs(f(0) - fa));
            rep.max_error = std::max(rep.max_error, std::abs(f(1) - fb));
        }
    } else if (system_id == "rho_tilde") {
        for (double y : grid) {
            Eigen::VectorXd yv(1);
            yv(0) = y;
            RieszResult rr = riesz_limit(spec, yv, pf_v, 1e-12, 400);
            Eigen::VectorXcd f = window_ft(rr, eta);
            rep.max_error = std::max(rep.max_error, std::abs(f(1) - rho_tilde_f1_series(y)));
        }
    } else {
        throw ValidationError("closed_form_check: unknown system id '" + system_id + "'");
    }
    return rep;
}

} // namespace spectra
