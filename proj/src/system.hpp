#pragma once

#include "diffraction.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "svg.hpp"

#include <optional>

namespace spectra {

struct SystemOptions {
    double pf_tol = 1e-12;
    double window_tol = 1e-12;
    std::size_t window_points = 20000;
    std::uint64_t mc_samples = 400000;
    double cocycle_tol = 1e-10;
    int cocycle_nmax = 200;
    int threads = 1;
    std::optional<int> power_override;
    std::optional<std::pair<std::string, std::string>> seed_override;
};

// One analysed inflation system: rule -> matrix -> field -> lengths ->
// displacement -> Fourier spec, with lazily computed windows.
class System {
public:
    static System from_text(const std::string& text, const std::string& name_hint = "", SystemOptions opt = {});
    static System from_file(const std::string& path, SystemOptions opt = {});
    static System from_fixture(const std::string& name, SystemOptions opt = {});

    const SystemOptions& options() const { return opt_; }
    const SubstitutionRule& rule() const { return rule_; }
    const IntMatrix& matrix() const { return matrix_; }
    const IntPoly& characteristic_polynomial() const { return charpoly_; }
    const PFData& pf() const { return pf_; }
    const FieldPtr& field() const { return field_; }
    const std::vector<FieldElement>& lengths() const { return lengths_; }
    const std::string& scaling_note() const { return scaling_note_; }
    const Displacement& displacement() const { return disp_; }
    const FourierMatrixSpec& fourier() const { return spec_; }
    const FixedSeed& fixed_seed() const { return seed_; }
    DensityInfo density_info() const { return density(pf_, lengths_); }

    const WindowSolution& windows();

    RieszResult riesz(const Eigen::VectorXd& y) const { return riesz(y, opt_.cocycle_tol, opt_.cocycle_nmax); }
    RieszResult riesz(const Eigen::VectorXd& y, double tol, int nmax) const {
        return riesz_limit(spec_, y, pf_.v, tol, nmax);
    }

    TypedPointSet patch_with_radius(double r) const {
        return patch_to_radius(rule_, disp_, field_, seed_.seed, seed_.power, r);
    }

    SpectrumTable diffract(PeakOptions opt, Eigen::VectorXcd weights = {});
    OracleReport verify(const std::vector<long>& miller, double r);

    // Reports (deterministic; numbers at 15 significant digits in JSON/CSV).
    std::string rule_report() const;
    std::string field_report_text() const;
    std::string field_report_json() const;
    std::string windows_summary_json();
    std::string windows_csv();
    std::string windows_svg();
    std::string cocycle_json(const Eigen::VectorXd& y, double tol, int nmax) const;
    std::string spectrum_json(const SpectrumTable& table) const;
    std::string spectrum_svg_text(const SpectrumTable& table) const { return render_spectrum_svg(table); }
    std::string spectrum_csv_text(const SpectrumTable& table) const {
        return spectrum_csv(table, rule_, field_->degree());
    }
    std::string oracle_json(const OracleReport& report) const;

private:
    SystemOptions opt_;
    SubstitutionRule rule_;
    IntMatrix matrix_;
    IntPoly charpoly_;
    PFData pf_;
    FieldPtr field_;
    std::vector<FieldElement> lengths_;
    std::string scaling_note_;
    Displacement disp_;
    FourierMatrixSpec spec_;
    FixedSeed seed_;
    std::optional<WindowSolution> windows_;
};

// Pretty form "(a0 + a1 L + ...)/den" with a common denominator.
std::string pretty_element(const FieldElement& x, const std::string& var = "L");

// Round to 15 significant digits (serialisation contract).
double sig15(double x);

} // namespace spectra
