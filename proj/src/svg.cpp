#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace spectra {

namespace {

std::string num(double x) {
    if (x == 0) x = 0; // avoid "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

const std::string& color(const SvgStyle& st, int i) {
    return st.palette[static_cast<size_t>(i) % st.palette.size()];
}

std::string header(int w, int h) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
       << " " << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

} // namespace

std::string render_windows_svg(const WindowSolution& sol, const SubstitutionRule& rule, const SvgStyle& style) {
    std::ostringstream os;
    const int W = style.width, H = style.height;
    os << header(W, H);
    const double margin = 50;

    if (sol.internal_dim == 1) {
        double lo = 1e30, hi = -1e30;
        for (const auto& u : sol.interval_windows)
            for (const auto& p : u.parts) {
                lo = std::min(lo, p.lo);
                hi = std::max(hi, p.hi);
            }
        double span = hi - lo;
        lo -= 0.05 * span;
        hi += 0.05 * span;
        auto X = [&](double x) { return margin + (x - lo) / (hi - lo) * (W - 2 * margin); };
        const int n = static_cast<int>(sol.interval_windows.size());
        double band = (H - 2 * margin) / n;
        for (int i = 0; i < n; ++i) {
            double y0 = margin + i * band + band * 0.2;
            double hgt = band * 0.6;
            for (const auto& p : sol.interval_windows[static_cast<size_t>(i)].parts)
                os << "<rect x=\"" << num(X(p.lo)) << "\" y=\"" << num(y0) << "\" width=\"" << num(X(p.hi) - X(p.lo))
                   << "\" height=\"" << num(hgt) << "\" fill=\"" << color(style, i) << "\"/>\n";
            os << "<text x=\"" << num(margin * 0.3) << "\" y=\"" << num(y0 + hgt / 2) << "\" font-size=\"14\">"
               << rule.letter(i) << "</text>\n";
        }
        // Unit ticks.
        double axis_y = H - margin * 0.6;
        os << "<line x1=\"" << num(X(lo)) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(X(hi)) << "\" y2=\""
           << num(axis_y) << "\" stroke=\"black\"/>\n";
        for (double t = std::ceil(lo); t <= hi; t += 1.0)
            os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(axis_y - 5) << "\" x2=\"" << num(X(t)) << "\" y2=\""
               << num(axis_y + 5) << "\" stroke=\"black\"/>\n";
    } else {
        double lo0 = 1e30, hi0 = -1e30, lo1 = 1e30, hi1 = -1e30;
        for (const auto& c : sol.clouds) {
            lo0 = std::min(lo0, c.col(0).minCoeff());
            hi0 = std::max(hi0, c.col(0).maxCoeff());
            lo1 = std::min(lo1, c.col(1).minCoeff());
            hi1 = std::max(hi1, c.col(1).maxCoeff());
        }
        double pad0 = 0.05 * (hi0 - lo0), pad1 = 0.05 * (hi1 - lo1);
        lo0 -= pad0;
        hi0 += pad0;
        lo1 -= pad1;
        hi1 += pad1;
        auto X = [&](double x) { return margin + (x - lo0) / (hi0 - lo0) * (W - 2 * margin); };
        auto Y = [&](double y) { return H - margin - (y - lo1) / (hi1 - lo1) * (H - 2 * margin); };
        for (size_t i = 0; i < sol.clouds.size(); ++i) {
            const auto& c = sol.clouds[i];
            os << "<g fill=\"" << color(style, static_cast<int>(i)) << "\">\n";
            Eigen::Index step = std::max<Eigen::Index>(1, c.rows() / 40000);
            for (Eigen::Index r = 0; r < c.rows(); r += step)
                os << "<circle cx=\"" << num(X(c(r, 0))) << "\" cy=\"" << num(Y(c(r, 1))) << "\" r=\"0.7\"/>\n";
            os << "</g>\n";
        }
        // Unit-tick axes through the origin.
        os << "<line x1=\"" << num(X(lo0)) << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << num(X(hi0)) << "\" y2=\""
           << num(Y(0)) << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(lo1)) << "\" x2=\"" << num(X(0)) << "\" y2=\""
           << num(Y(hi1)) << "\" stroke=\"black\"/>\n";
        for (double t = std::ceil(lo0); t <= hi0; t += 1.0)
            os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(Y(0) - 4) << "\" x2=\"" << num(X(t)) << "\" y2=\""
               << num(Y(0) + 4) << "\" stroke=\"black\"/>\n";
        for (double t = std::ceil(lo1); t <= hi1; t += 1.0)
            os << "<line x1=\"" << num(X(0) - 4) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(X(0) + 4) << "\" y2=\""
               << num(Y(t)) << "\" stroke=\"black\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_spectrum_svg(const SpectrumTable& table, const SvgStyle& style) {
    std::ostringstream os;
    const int W = style.width, H = style.height;
    os << header(W, H);
    const double margin = 50;
    double kmin = 0, kmax = 1, imax = 1e-300;
    if (!table.rows.empty()) {
        kmin = table.rows.front().k;
        kmax = table.rows.back().k;
        for (const auto& r : table.rows) imax = std::max(imax, r.intensity);
    }
    if (kmax <= kmin) kmax = kmin + 1;
    auto X = [&](double k) { return margin + (k - kmin) / (kmax - kmin) * (W - 2 * margin); };
    double base = H - margin;
    auto Y = [&](double inten) { return base - inten / imax * (H - 2 * margin); };

    os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(base) << "\" x2=\"" << num(W - margin) << "\" y2=\""
       << num(base) << "\" stroke=\"black\"/>\n";
    for (double t = std::ceil(kmin); t <= kmax; t += 1.0)
        os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(base) << "\" x2=\"" << num(X(t)) << "\" y2=\""
           << num(base + 6) << "\" stroke=\"black\"/>\n";

    for (const auto& r : table.rows)
        os << "<line x1=\"" << num(X(r.k)) << "\" y1=\"" << num(base) << "\" x2=\"" << num(X(r.k)) << "\" y2=\""
           << num(Y(r.intensity)) << "\" stroke=\"" << style.palette[0] << "\" stroke-width=\"1.2\"/>\n";

    // Label the tallest peaks with their Miller tuples.
    std::vector<const SpectrumRow*> by_int;
    for (const auto& r : table.rows) by_int.push_back(&r);
    std::sort(by_int.begin(), by_int.end(), [](const SpectrumRow* a, const SpectrumRow* b) {
        if (a->intensity != b->intensity) return a->intensity > b->intensity;
        return a->k < b->k;
    });
    int labels = std::min<int>(style.max_labels, static_cast<int>(by_int.size()));
    for (int i = 0; i < labels; ++i) {
        const auto& r = *by_int[static_cast<size_t>(i)];
        std::ostringstream lab;
        lab << "(";
        for (size_t j = 0; j < r.miller.size(); ++j) lab << (j ? "," : "") << r.miller[j];
        lab << ")";
        os << "<text x=\"" << num(X(r.k) + 3) << "\" y=\"" << num(Y(r.intensity) - 3) << "\" font-size=\"11\">"
           << lab.str() << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace spectra
