#include "diffraction.hpp"

#include "errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace spectra {

DensityInfo density(const PFData& pf, const std::vector<FieldElement>& lengths) {
    DensityInfo d;
    const int n = static_cast<int>(lengths.size());
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += pf.v(i) * lengths[static_cast<size_t>(i)].real_value();
    d.mean_length = mean;
    d.total = 1.0 / mean;
    d.per_letter = pf.v * d.total;
    return d;
}

AmplitudeResult amplitudes_at(const RieszResult& riesz, const DensityInfo& dens, const Eigen::VectorXd& pf_v,
                              const WindowSolution& windows) {
    AmplitudeResult out;
    const int n = static_cast<int>(pf_v.size());
    if (windows.covering.constant) {
        out.amplitudes = dens.total * riesz.c;
        out.formula = "constant-covering";
    } else {
        // dens(Lambda_i)/vol(W_i) * f_i with f_i = eta c_i.
        out.amplitudes.resize(n);
        for (int i = 0; i < n; ++i) {
            double ratio = dens.per_letter(i) / windows.volumes[static_cast<size_t>(i)];
            out.amplitudes(i) = ratio * windows.eta * riesz.c(i);
        }
        out.formula = "per-letter";
    }
    return out;
}

SpectrumTable enumerate_peaks(const FieldPtr& field, const FourierMatrixSpec& spec, const DensityInfo& dens,
                              const Eigen::VectorXd& pf_v, const WindowSolution& windows,
                              const Eigen::VectorXcd& weights, const PeakOptions& opt) {
    if (opt.miller_box < 0) throw ValidationError("enumerate_peaks: box must be >= 0");
    const int d = field->degree();
    SpectrumTable table;
    table.weights = weights;
    table.dens_total = dens.total;
    table.intensity_floor = opt.floor_rel * dens.total * dens.total;
    table.covering_constant = windows.covering.constant;
    table.covering_degree = windows.covering.degree;
    table.amplitude_formula = windows.covering.constant ? "constant-covering" : "per-letter";

    // Real values of theta * lambda^i for the cheap k prefilter.
    std::vector<double> kbasis(static_cast<size_t>(d));
    {
        FieldElement t = field->fourier_generator();
        for (int i = 0; i < d; ++i) {
            kbasis[static_cast<size_t>(i)] = t.real_value();
            t = t.mul_lambda();
        }
    }

    std::vector<std::vector<long>> survivors;
    std::vector<long> tuple(static_cast<size_t>(d), -opt.miller_box);
    const double eps = 1e-9;
    for (;;) {
        double k = 0;
        for (int i = 0; i < d; ++i) k += static_cast<double>(tuple[static_cast<size_t>(i)]) * kbasis[static_cast<size_t>(i)];
        if (k >= opt.k_min - eps && k <= opt.k_max + eps) survivors.push_back(tuple);
        int pos = 0;
        while (pos < d && ++tuple[static_cast<size_t>(pos)] > opt.miller_box) {
            tuple[static_cast<size_t>(pos)] = -opt.miller_box;
            ++pos;
        }
        if (pos == d) break;
    }

    std::vector<SpectrumRow> rows(survivors.size());
    const int blocks = std::max(1, std::min<int>(256, static_cast<int>(survivors.size() / 16 + 1)));
    parallel_blocks(blocks, opt.threads, [&](int b) {
        size_t begin = survivors.size() * static_cast<size_t>(b) / static_cast<size_t>(blocks);
        size_t end = survivors.size() * static_cast<size_t>(b + 1) / static_cast<size_t>(blocks);
        for (size_t s = begin; s < end; ++s) {
            SpectrumRow row;
            row.miller = survivors[s];
            FieldElement kf = field->miller_element(row.miller);
            row.k = kf.real_value();
            row.kstar = field->star_map(kf);
            RieszResult rr = riesz_limit(spec, row.kstar, pf_v, opt.cocycle_tol, opt.cocycle_nmax);
            row.amplitudes = amplitudes_at(rr, dens, pf_v, windows).amplitudes;
            std::complex<double> sum(0, 0);
            for (int i = 0; i < row.amplitudes.size(); ++i) sum += weights(i) * row.amplitudes(i);
            row.intensity = std::norm(sum);
            rows[s] = std::move(row);
        }
    });

    for (auto& row : rows)
        if (row.intensity >= table.intensity_floor) table.rows.push_back(std::move(row));
    std::sort(table.rows.begin(), table.rows.end(), [](const SpectrumRow& a, const SpectrumRow& b) {
        if (a.k != b.k) return a.k < b.k;
        return a.miller < b.miller;
    });
    for (size_t i = 0; i + 1 < table.rows.size(); ++i)
        if (std::abs(table.rows[i].k - table.rows[i + 1].k) < 1e-12) table.duplicate_k_flag = true;
    return table;
}

namespace {

std::string fmt15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

} // namespace

std::string spectrum_csv(const SpectrumTable& table, const SubstitutionRule& rule, int field_degree) {
    std::ostringstream os;
    for (int i = 0; i < field_degree; ++i) os << "m" << i << ",";
    os << "k";
    for (int i = 0; i < rule.alphabet_size; ++i)
        os << ",re_A_" << rule.letter(i) << ",im_A_" << rule.letter(i);
    os << ",intensity\n";
    for (const auto& row : table.rows) {
        for (long m : row.miller) os << m << ",";
        os << fmt15(row.k);
        for (int i = 0; i < row.amplitudes.size(); ++i)
            os << "," << fmt15(row.amplitudes(i).real()) << "," << fmt15(row.amplitudes(i).imag());
        os << "," << fmt15(row.intensity) << "\n";
    }
    return os.str();
}

} // namespace spectra
