#include "spectra/spectra.h"

#include "errors.hpp"
#include "system.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

struct spectra_system {
    spectra::System sys;
    std::optional<spectra::SpectrumTable> table;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) return nullptr;
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

template <typename Fn>
spectra_status wrap(Fn&& fn) {
    try {
        fn();
        return SPECTRA_OK;
    } catch (const spectra::ValidationError& e) {
        g_last_error = e.what();
        return SPECTRA_ERR_VALIDATION;
    } catch (const spectra::ConvergenceError& e) {
        g_last_error = e.what();
        return SPECTRA_ERR_CONVERGENCE;
    } catch (const spectra::IoError& e) {
        g_last_error = e.what();
        return SPECTRA_ERR_IO;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SPECTRA_ERR_VALIDATION;
    }
}

spectra::SystemOptions convert(const spectra_options* opt) {
    spectra::SystemOptions o;
    if (!opt) return o;
    if (opt->pf_tol > 0) o.pf_tol = opt->pf_tol;
    if (opt->window_tol > 0) o.window_tol = opt->window_tol;
    if (opt->window_points > 0) o.window_points = static_cast<std::size_t>(opt->window_points);
    if (opt->mc_samples > 0) o.mc_samples = static_cast<std::uint64_t>(opt->mc_samples);
    if (opt->cocycle_tol > 0) o.cocycle_tol = opt->cocycle_tol;
    if (opt->cocycle_nmax > 0) o.cocycle_nmax = opt->cocycle_nmax;
    if (opt->threads > 0) o.threads = opt->threads;
    if (opt->power_override > 0) o.power_override = opt->power_override;
    if (opt->seed && *opt->seed) {
        std::string s = opt->seed;
        auto bar = s.find('|');
        if (bar == std::string::npos)
            throw spectra::ValidationError("seed override must have the form 'x|y'");
        o.seed_override = {s.substr(0, bar), s.substr(bar + 1)};
    }
    return o;
}

} // namespace

extern "C" {

void spectra_options_init(spectra_options* opt) {
    if (!opt) return;
    std::memset(opt, 0, sizeof *opt);
}

const char* spectra_version(void) {
    return "spectra 1.0.0";
}

const char* spectra_last_error(void) {
    return g_last_error.c_str();
}

void spectra_string_free(char* s) {
    std::free(s);
}

spectra_status spectra_system_open(const char* rule_path, const spectra_options* opt, spectra_system** out) {
    if (!rule_path || !out) {
        g_last_error = "null argument";
        return SPECTRA_ERR_VALIDATION;
    }
    *out = nullptr;
    return wrap([&] { *out = new spectra_system{spectra::System::from_file(rule_path, convert(opt)), std::nullopt}; });
}

spectra_status spectra_system_from_text(const char* text, const char* name, const spectra_options* opt,
                                        spectra_system** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return SPECTRA_ERR_VALIDATION;
    }
    *out = nullptr;
    return wrap([&] {
        *out = new spectra_system{spectra::System::from_text(text, name ? name : "", convert(opt)), std::nullopt};
    });
}

spectra_status spectra_system_from_fixture(const char* fixture, const spectra_options* opt, spectra_system** out) {
    if (!fixture || !out) {
        g_last_error = "null argument";
        return SPECTRA_ERR_VALIDATION;
    }
    *out = nullptr;
    return wrap([&] { *out = new spectra_system{spectra::System::from_fixture(fixture, convert(opt)), std::nullopt}; });
}

void spectra_system_close(spectra_system* sys) {
    delete sys;
}

int spectra_alphabet_size(const spectra_system* sys) {
    return sys ? sys->sys.rule().alphabet_size : 0;
}

int spectra_field_degree(const spectra_system* sys) {
    return sys ? sys->sys.field()->degree() : 0;
}

spectra_status spectra_rule_report(spectra_system* sys, char** out_text) {
    if (!sys || !out_text) return SPECTRA_ERR_VALIDATION;
    return wrap([&] { *out_text = dup_string(sys->sys.rule_report()); });
}

spectra_status spectra_field_report(spectra_system* sys, int as_json, char** out_text) {
    if (!sys || !out_text) return SPECTRA_ERR_VALIDATION;
    return wrap([&] { *out_text = dup_string(as_json ? sys->sys.field_report_json() : sys->sys.field_report_text()); });
}

spectra_status spectra_windows_json(spectra_system* sys, char** out_json) {
    if (!sys || !out_json) return SPECTRA_ERR_VALIDATION;
    return wrap([&] { *out_json = dup_string(sys->sys.windows_summary_json()); });
}

spectra_status spectra_windows_csv(spectra_system* sys, char** out_csv) {
    if (!sys || !out_csv) return SPECTRA_ERR_VALIDATION;
    return wrap([&] { *out_csv = dup_string(sys->sys.windows_csv()); });
}

spectra_status spectra_windows_svg(spectra_system* sys, char** out_svg) {
    if (!sys || !out_svg) return SPECTRA_ERR_VALIDATION;
    return wrap([&] { *out_svg = dup_string(sys->sys.windows_svg()); });
}

spectra_status spectra_cocycle_json(spectra_system* sys, const double* y, int ydim, double tol, int nmax,
                                    char** out_json) {
    if (!sys || !y || !out_json) return SPECTRA_ERR_VALIDATION;
    return wrap([&] {
        Eigen::VectorXd yv(ydim);
        for (int i = 0; i < ydim; ++i) yv(i) = y[i];
        double t = tol > 0 ? tol : sys->sys.options().cocycle_tol;
        int n = nmax > 0 ? nmax : sys->sys.options().cocycle_nmax;
        *out_json = dup_string(sys->sys.cocycle_json(yv, t, n));
    });
}

spectra_status spectra_diffract(spectra_system* sys, long box, double kmax, double floor_rel, const double* weights_re,
                                const double* weights_im, int nweights) {
    if (!sys) return SPECTRA_ERR_VALIDATION;
    return wrap([&] {
        spectra::PeakOptions opt;
        opt.miller_box = box > 0 ? box : 25;
        opt.k_max = kmax > 0 ? kmax : 10.0;
        opt.floor_rel = floor_rel > 0 ? floor_rel : 1e-6;
        Eigen::VectorXcd w;
        if (weights_re && nweights > 0) {
            w.resize(nweights);
            for (int i = 0; i < nweights; ++i)
                w(i) = std::complex<double>(weights_re[i], weights_im ? weights_im[i] : 0.0);
        }
        sys->table = sys->sys.diffract(opt, w);
    });
}

spectra_status spectra_spectrum_json(spectra_system* sys, char** out_json) {
    if (!sys || !out_json) return SPECTRA_ERR_VALIDATION;
    if (!sys->table) {
        g_last_error = "no spectrum computed yet (call spectra_diffract first)";
        return SPECTRA_ERR_VALIDATION;
    }
    return wrap([&] { *out_json = dup_string(sys->sys.spectrum_json(*sys->table)); });
}

spectra_status spectra_spectrum_csv(spectra_system* sys, char** out_csv) {
    if (!sys || !out_csv) return SPECTRA_ERR_VALIDATION;
    if (!sys->table) {
        g_last_error = "no spectrum computed yet (call spectra_diffract first)";
        return SPECTRA_ERR_VALIDATION;
    }
    return wrap([&] { *out_csv = dup_string(sys->sys.spectrum_csv_text(*sys->table)); });
}

spectra_status spectra_spectrum_svg(spectra_system* sys, char** out_svg) {
    if (!sys || !out_svg) return SPECTRA_ERR_VALIDATION;
    if (!sys->table) {
        g_last_error = "no spectrum computed yet (call spectra_diffract first)";
        return SPECTRA_ERR_VALIDATION;
    }
    return wrap([&] { *out_svg = dup_string(sys->sys.spectrum_svg_text(*sys->table)); });
}

spectra_status spectra_verify_json(spectra_system* sys, const long* miller, int nmiller, double r, char** out_json) {
    if (!sys || !miller || !out_json) return SPECTRA_ERR_VALIDATION;
    return wrap([&] {
        std::vector<long> m(miller, miller + nmiller);
        spectra::OracleReport rep = sys->sys.verify(m, r > 0 ? r : 1e5);
        *out_json = dup_string(sys->sys.oracle_json(rep));
    });
}

spectra_status spectra_fixture_names(char** out_json) {
    if (!out_json) return SPECTRA_ERR_VALIDATION;
    return wrap([&] {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : spectra::fixture_catalogue()) arr.push_back(f.name);
        *out_json = dup_string(arr.dump(2) + "\n");
    });
}

spectra_status spectra_fixture_text(const char* name, char** out_text) {
    if (!name || !out_text) return SPECTRA_ERR_VALIDATION;
    const spectra::Fixture* f = spectra::find_fixture(name);
    if (!f) {
        g_last_error = std::string("unknown fixture '") + name + "'";
        return SPECTRA_ERR_VALIDATION;
    }
    return wrap([&] { *out_text = dup_string(f->rule_text); });
}

} // extern "C"
