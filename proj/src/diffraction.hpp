#pragma once

#include "cocycle.hpp"
#include "windows.hpp"

namespace spectra {

struct DensityInfo {
    double total = 0;             // dens(Lambda) = 1 / mean tile length
    Eigen::VectorXd per_letter;   // v_i * dens(Lambda)
    double mean_length = 0;
};

DensityInfo density(const PFData& pf, const std::vector<FieldElement>& lengths);

// FB amplitudes at one wave number. Uses A_i = dens(Lambda) c_i(k*) under a
// certified (a.e.-)constant covering; otherwise the per-letter model-set
// formula A_i = dens(Lambda_i)/vol(W_i) * f_i(k*). Records which was used.
struct AmplitudeResult {
    Eigen::VectorXcd amplitudes;
    std::string formula; // "constant-covering" or "per-letter"
};

AmplitudeResult amplitudes_at(const RieszResult& riesz, const DensityInfo& dens, const Eigen::VectorXd& pf_v,
                              const WindowSolution& windows);

struct SpectrumRow {
    std::vector<long> miller;
    double k = 0;
    Eigen::VectorXd kstar;
    Eigen::VectorXcd amplitudes;
    double intensity = 0;
};

struct SpectrumTable {
    std::vector<SpectrumRow> rows; // sorted by k
    Eigen::VectorXcd weights;
    double dens_total = 0;
    double intensity_floor = 0;   // absolute
    bool covering_constant = true;
    int covering_degree = 1;
    std::string amplitude_formula;
    bool duplicate_k_flag = false; // genuine k-coincidences (flagged, not expected)
};

struct PeakOptions {
    long miller_box = 25;        // each index in [-box, box]
    double k_min = 0;
    double k_max = 10;
    double floor_rel = 1e-6;     // relative to dens(Lambda)^2
    double cocycle_tol = 1e-10;
    int cocycle_nmax = 200;
    int threads = 1;
};

SpectrumTable enumerate_peaks(const FieldPtr& field, const FourierMatrixSpec& spec, const DensityInfo& dens,
                              const Eigen::VectorXd& pf_v, const WindowSolution& windows,
                              const Eigen::VectorXcd& weights, const PeakOptions& opt);

// CSV with miller indices, k, per-letter Re/Im amplitudes and intensity.
std::string spectrum_csv(const SpectrumTable& table, const SubstitutionRule& rule, int field_degree);

} // namespace spectra
