// spectra: diffraction spectra of 1D Pisot-unit inflation tilings.
// Thin command-line front end over the C library API.

#include <spectra/spectra.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { spectra_string_free(s); }
};

struct SystemGuard {
    spectra_system* sys = nullptr;
    ~SystemGuard() { spectra_system_close(sys); }
};

int fail(spectra_status st) {
    std::cerr << "error: " << spectra_last_error() << "\n";
    return static_cast<int>(st);
}

int write_file(const std::string& path, const char* content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 4;
    }
    out << content;
    return out.good() ? 0 : 4;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stod(cur));
    return out;
}

std::vector<long> parse_longs(const std::string& s) {
    std::vector<long> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(std::stol(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stol(cur));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectra: pure-point diffraction of 1D Pisot-unit inflation tilings"};
    app.require_subcommand(1);

    spectra_options opt;
    spectra_options_init(&opt);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap")->envname("SPECTRA_THREADS");
    int power_override = 0;
    std::string seed_override;
    app.add_option("--power", power_override, "override the fixed substitution power");
    app.add_option("--seed", seed_override, "override the two-letter seed, e.g. a|a");

    // rule check <file>
    auto* rule_cmd = app.add_subcommand("rule", "rule-file utilities");
    auto* check_cmd = rule_cmd->add_subcommand("check", "parse and validate a rule file");
    std::string check_file;
    check_cmd->add_option("file", check_file, "rule file")->required();

    // field <file>
    auto* field_cmd = app.add_subcommand("field", "number field and Fourier module data");
    std::string field_file, field_json;
    field_cmd->add_option("file", field_file, "rule file")->required();
    field_cmd->add_option("--json", field_json, "also write a JSON report to this path");

    // windows <file>
    auto* win_cmd = app.add_subcommand("windows", "solve the Rauzy-fractal windows");
    std::string win_file, win_svg, win_csv, win_json;
    long win_points = 0;
    double win_tol = 0;
    long long win_samples = 0;
    win_cmd->add_option("file", win_file, "rule file")->required();
    win_cmd->add_option("--points", win_points, "target cloud points per letter");
    win_cmd->add_option("--tol", win_tol, "Hausdorff stopping tolerance");
    win_cmd->add_option("--samples", win_samples, "Monte-Carlo samples per letter");
    win_cmd->add_option("--svg", win_svg, "write window figure SVG");
    win_cmd->add_option("--csv", win_csv, "write window CSV");
    win_cmd->add_option("--json", win_json, "write summary JSON");

    // cocycle <file> --y ...
    auto* coc_cmd = app.add_subcommand("cocycle", "evaluate the matrix Riesz product C(y)");
    std::string coc_file, coc_y;
    double coc_tol = 0;
    int coc_n = 0;
    coc_cmd->add_option("file", coc_file, "rule file")->required();
    coc_cmd->add_option("--y", coc_y, "internal point, comma-separated (d-1 values)")->required();
    coc_cmd->add_option("--tol", coc_tol, "residual tolerance");
    coc_cmd->add_option("--n", coc_n, "maximum number of factors");

    // diffract <file>
    auto* dif_cmd = app.add_subcommand("diffract", "enumerate Bragg peaks over the Fourier module");
    std::string dif_file, dif_csv, dif_svg, dif_json, dif_weights;
    double dif_kmax = 10.0, dif_floor = 1e-6;
    long dif_box = 25;
    dif_cmd->add_option("file", dif_file, "rule file")->required();
    dif_cmd->add_option("--kmax", dif_kmax, "wave-number window [0, kmax]");
    dif_cmd->add_option("--box", dif_box, "Miller index box, each index in [-box, box]");
    dif_cmd->add_option("--weights", dif_weights, "per-letter weights, comma-separated");
    dif_cmd->add_option("--floor", dif_floor, "relative intensity floor");
    dif_cmd->add_option("--csv", dif_csv, "write peak table CSV");
    dif_cmd->add_option("--svg", dif_svg, "write diffraction figure SVG");
    dif_cmd->add_option("--json", dif_json, "write peak table JSON");

    // verify <file> --k ...
    auto* ver_cmd = app.add_subcommand("verify", "brute-force Fourier-Bohr cross-check");
    std::string ver_file, ver_k, ver_json;
    double ver_r = 1e5;
    ver_cmd->add_option("file", ver_file, "rule file")->required();
    ver_cmd->add_option("--k", ver_k, "Miller tuple, comma-separated (d values)")->required();
    ver_cmd->add_option("--r", ver_r, "averaging radius");
    ver_cmd->add_option("--json", ver_json, "write report JSON to this path");

    // fixtures
    auto* fix_cmd = app.add_subcommand("fixtures", "list or export the built-in example rules");
    std::string fix_name, fix_dir;
    fix_cmd->add_option("name", fix_name, "print this fixture's rule file");
    fix_cmd->add_option("--write-dir", fix_dir, "write all fixtures as .rule files into this directory");

    CLI11_PARSE(app, argc, argv);

    if (threads > 0) opt.threads = threads;
    if (power_override > 0) opt.power_override = power_override;
    if (!seed_override.empty()) opt.seed = seed_override.c_str();

    auto open_system = [&](const std::string& path, SystemGuard& g) -> spectra_status {
        return spectra_system_open(path.c_str(), &opt, &g.sys);
    };

    if (check_cmd->parsed()) {
        SystemGuard g;
        if (auto st = open_system(check_file, g); st != SPECTRA_OK) return fail(st);
        StringGuard s;
        if (auto st = spectra_rule_report(g.sys, &s.s); st != SPECTRA_OK) return fail(st);
        std::cout << s.s;
        std::cout << "ok\n";
        return 0;
    }

    if (field_cmd->parsed()) {
        SystemGuard g;
        if (auto st = open_system(field_file, g); st != SPECTRA_OK) return fail(st);
        StringGuard txt;
        if (auto st = spectra_field_report(g.sys, 0, &txt.s); st != SPECTRA_OK) return fail(st);
        std::cout << txt.s;
        StringGuard js;
        if (auto st = spectra_field_report(g.sys, 1, &js.s); st != SPECTRA_OK) return fail(st);
        if (!field_json.empty()) {
            if (int rc = write_file(field_json, js.s)) return rc;
        } else {
            std::cout << js.s;
        }
        return 0;
    }

    if (win_cmd->parsed()) {
        if (win_points > 0) opt.window_points = win_points;
        if (win_tol > 0) opt.window_tol = win_tol;
        if (win_samples > 0) opt.mc_samples = win_samples;
        SystemGuard g;
        if (auto st = open_system(win_file, g); st != SPECTRA_OK) return fail(st);
        StringGuard js;
        if (auto st = spectra_windows_json(g.sys, &js.s); st != SPECTRA_OK) return fail(st);
        std::cout << js.s;
        if (!win_json.empty())
            if (int rc = write_file(win_json, js.s)) return rc;
        if (!win_csv.empty()) {
            StringGuard csv;
            if (auto st = spectra_windows_csv(g.sys, &csv.s); st != SPECTRA_OK) return fail(st);
            if (int rc = write_file(win_csv, csv.s)) return rc;
        }
        if (!win_svg.empty()) {
            StringGuard svg;
            if (auto st = spectra_windows_svg(g.sys, &svg.s); st != SPECTRA_OK) return fail(st);
            if (int rc = write_file(win_svg, svg.s)) return rc;
        }
        return 0;
    }

    if (coc_cmd->parsed()) {
        SystemGuard g;
        if (auto st = open_system(coc_file, g); st != SPECTRA_OK) return fail(st);
        auto y = parse_doubles(coc_y);
        int need = spectra_field_degree(g.sys) - 1;
        if (static_cast<int>(y.size()) != need) {
            std::cerr << "error: --y needs " << need << " components for this rule\n";
            return 2;
        }
        StringGuard js;
        if (auto st = spectra_cocycle_json(g.sys, y.data(), static_cast<int>(y.size()), coc_tol, coc_n, &js.s);
            st != SPECTRA_OK)
            return fail(st);
        std::cout << js.s;
        return 0;
    }

    if (dif_cmd->parsed()) {
        SystemGuard g;
        if (auto st = open_system(dif_file, g); st != SPECTRA_OK) return fail(st);
        std::vector<double> wre;
        if (!dif_weights.empty()) {
            wre = parse_doubles(dif_weights);
            if (static_cast<int>(wre.size()) != spectra_alphabet_size(g.sys)) {
                std::cerr << "error: --weights needs one value per letter\n";
                return 2;
            }
        }
        if (auto st = spectra_diffract(g.sys, dif_box, dif_kmax, dif_floor, wre.empty() ? nullptr : wre.data(), nullptr,
                                       static_cast<int>(wre.size()));
            st != SPECTRA_OK)
            return fail(st);
        StringGuard js;
        if (auto st = spectra_spectrum_json(g.sys, &js.s); st != SPECTRA_OK) return fail(st);
        if (!dif_json.empty()) {
            if (int rc = write_file(dif_json, js.s)) return rc;
        }
        if (!dif_csv.empty()) {
            StringGuard csv;
            if (auto st = spectra_spectrum_csv(g.sys, &csv.s); st != SPECTRA_OK) return fail(st);
            if (int rc = write_file(dif_csv, csv.s)) return rc;
        }
        if (!dif_svg.empty()) {
            StringGuard svg;
            if (auto st = spectra_spectrum_svg(g.sys, &svg.s); st != SPECTRA_OK) return fail(st);
            if (int rc = write_file(dif_svg, svg.s)) return rc;
        }
        if (dif_json.empty() && dif_csv.empty() && dif_svg.empty()) std::cout << js.s;
        return 0;
    }

    if (ver_cmd->parsed()) {
        SystemGuard g;
        if (auto st = open_system(ver_file, g); st != SPECTRA_OK) return fail(st);
        auto miller = parse_longs(ver_k);
        if (static_cast<int>(miller.size()) != spectra_field_degree(g.sys)) {
            std::cerr << "error: --k needs " << spectra_field_degree(g.sys) << " Miller indices for this rule\n";
            return 2;
        }
        StringGuard js;
        if (auto st = spectra_verify_json(g.sys, miller.data(), static_cast<int>(miller.size()), ver_r, &js.s);
            st != SPECTRA_OK)
            return fail(st);
        std::cout << js.s;
        if (!ver_json.empty())
            if (int rc = write_file(ver_json, js.s)) return rc;
        return 0;
    }

    if (fix_cmd->parsed()) {
        if (!fix_name.empty()) {
            StringGuard txt;
            if (auto st = spectra_fixture_text(fix_name.c_str(), &txt.s); st != SPECTRA_OK) return fail(st);
            std::cout << txt.s;
            return 0;
        }
        StringGuard names;
        if (auto st = spectra_fixture_names(&names.s); st != SPECTRA_OK) return fail(st);
        if (!fix_dir.empty()) {
            // Write each fixture as <dir>/<name>.rule.
            std::string json = names.s;
            size_t pos = 0;
            while ((pos = json.find('"', pos)) != std::string::npos) {
                size_t end = json.find('"', pos + 1);
                if (end == std::string::npos) break;
                std::string name = json.substr(pos + 1, end - pos - 1);
                StringGuard txt;
                if (auto st = spectra_fixture_text(name.c_str(), &txt.s); st != SPECTRA_OK) return fail(st);
                if (int rc = write_file(fix_dir + "/" + name + ".rule", txt.s)) return rc;
                pos = end + 1;
            }
            return 0;
        }
        std::cout << names.s;
        return 0;
    }

    std::cerr << "error: no subcommand\n";
    return 2;
}
