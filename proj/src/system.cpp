#include "system.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace spectra {

using nlohmann::json;

double sig15(double x) {
    if (x == 0 || !std::isfinite(x)) return x == 0 ? 0.0 : x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.14e", x);
    return std::strtod(buf, nullptr);
}

std::string pretty_element(const FieldElement& x, const std::string& var) {
    Int den = 1;
    for (const auto& c : x.coeffs()) den = lcm(den, c.get_den());
    std::ostringstream os;
    if (den == 1) {
        os << x.to_string(var);
        return os.str();
    }
    bool first = true;
    std::ostringstream numpoly;
    for (int i = static_cast<int>(x.coeffs().size()) - 1; i >= 0; --i) {
        Rat scaled = x.coeff(i) * Rat(den);
        if (scaled == 0) continue;
        Int a = scaled.get_num();
        Int mag = abs(a);
        if (first) {
            if (a < 0) numpoly << "-";
            first = false;
        } else {
            numpoly << (a < 0 ? " - " : " + ");
        }
        if (mag != 1 || i == 0) numpoly << mag.get_str();
        if (i >= 1) {
            numpoly << var;
            if (i > 1) numpoly << "^" << i;
        }
    }
    os << "(" << numpoly.str() << ")/" << den.get_str();
    return os.str();
}

namespace {

json element_json(const FieldElement& x) {
    json j;
    j["poly"] = pretty_element(x);
    j["value"] = sig15(x.real_value());
    json coeffs = json::array();
    for (const auto& c : x.coeffs()) coeffs.push_back(rat_to_string(c));
    j["coeffs"] = coeffs;
    return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(sig15(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json cmatrix_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({{"re", sig15(m(i, j).real())}, {"im", sig15(m(i, j).imag())}});
        rows.push_back(row);
    }
    return rows;
}

json cvector_json(const Eigen::VectorXcd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({{"re", sig15(v(i).real())}, {"im", sig15(v(i).imag())}});
    return arr;
}

} // namespace

System System::from_text(const std::string& text, const std::string& name_hint, SystemOptions opt) {
    System sys;
    sys.opt_ = std::move(opt);
    RuleFile rf = parse_rule(text);
    sys.rule_ = std::move(rf.rule);
    if (sys.rule_.name == "rule" && !name_hint.empty()) sys.rule_.name = name_hint;

    sys.matrix_ = substitution_matrix(sys.rule_);
    if (!is_primitive(sys.matrix_))
        throw ValidationError("rule '" + sys.rule_.name + "' is not primitive");
    sys.pf_ = pf_eigendata(sys.matrix_, sys.opt_.pf_tol);
    sys.charpoly_ = char_poly(sys.matrix_);
    IntPoly minpoly = minimal_polynomial(sys.charpoly_, sys.pf_.lambda);
    sys.field_ = NumberField::create(std::move(minpoly));

    if (rf.length_override) {
        for (const auto& coeffs : *rf.length_override) {
            FieldElement acc = sys.field_->zero();
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
                acc = acc.mul_lambda();
                std::vector<Rat> c(static_cast<size_t>(sys.field_->degree()), Rat(0));
                c[0] = Rat(*it);
                acc = acc + sys.field_->element(std::move(c));
            }
            sys.lengths_.push_back(acc);
        }
        sys.scaling_note_ = "lengths overridden by rule file";
    } else {
        NaturalLengths nl = natural_lengths(sys.rule_, sys.field_);
        sys.lengths_ = std::move(nl.lengths);
        sys.scaling_note_ = std::move(nl.scaling_note);
    }
    sys.disp_ = displacement_matrix(sys.rule_, sys.lengths_);
    sys.spec_ = fourier_spec(sys.disp_, sys.field_);

    FixedSeed fs = find_fixed_power_and_seed(sys.rule_);
    if (sys.opt_.power_override) fs.power = *sys.opt_.power_override;
    if (sys.opt_.seed_override) {
        auto find_letter = [&](const std::string& l) {
            for (int i = 0; i < sys.rule_.alphabet_size; ++i)
                if (sys.rule_.letter(i) == l) return i;
            throw ValidationError("seed override: unknown letter '" + l + "'");
        };
        fs.seed.left = find_letter(sys.opt_.seed_override->first);
        fs.seed.right = find_letter(sys.opt_.seed_override->second);
        if (!seed_is_legal(sys.rule_, fs.seed))
            throw ValidationError("seed override: pair is not legal for this rule");
    }
    sys.seed_ = fs;
    return sys;
}

System System::from_file(const std::string& path, SystemOptions opt) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rule file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return from_text(ss.str(), stem, std::move(opt));
}

System System::from_fixture(const std::string& name, SystemOptions opt) {
    const Fixture* f = find_fixture(name);
    if (!f) throw ValidationError("unknown fixture '" + name + "'");
    return from_text(f->rule_text, f->name, std::move(opt));
}

const WindowSolution& System::windows() {
    if (!windows_) {
        WindowOptions wopt;
        wopt.tol = opt_.window_tol;
        wopt.target_points = opt_.window_points;
        wopt.mc_samples = opt_.mc_samples;
        wopt.threads = opt_.threads;
        windows_ = solve_windows(rule_, disp_, field_, pf_.v, wopt);
    }
    return *windows_;
}

SpectrumTable System::diffract(PeakOptions opt, Eigen::VectorXcd weights) {
    if (weights.size() == 0) weights = Eigen::VectorXcd::Ones(rule_.alphabet_size);
    if (weights.size() != rule_.alphabet_size) throw ValidationError("diffract: one weight per letter required");
    opt.threads = opt_.threads;
    opt.cocycle_tol = opt_.cocycle_tol;
    opt.cocycle_nmax = opt_.cocycle_nmax;
    return enumerate_peaks(field_, spec_, density_info(), pf_.v, windows(), weights, opt);
}

OracleReport System::verify(const std::vector<long>& miller, double r) {
    OracleReport rep;
    FieldElement kf = field_->miller_element(miller);
    rep.k = kf.real_value();
    rep.radius = r;
    Eigen::VectorXd kstar = field_->star_map(kf);
    RieszResult rr = riesz(kstar);
    rep.cocycle = amplitudes_at(rr, density_info(), pf_.v, windows()).amplitudes;
    TypedPointSet patch = patch_with_radius(r);
    rep.brute = brute_fb(patch, rep.k, r, opt_.threads);
    rep.deviation = (rep.brute - rep.cocycle).cwiseAbs().maxCoeff();
    return rep;
}

std::string System::rule_report() const {
    std::ostringstream os;
    os << "rule: " << rule_.name << " (N=" << rule_.alphabet_size << ")\n";
    for (int i = 0; i < rule_.alphabet_size; ++i)
        os << "  " << rule_.letter(i) << " -> " << rule_.word_string(rule_.images[static_cast<size_t>(i)]) << "\n";
    os << "substitution matrix:\n";
    for (int i = 0; i < rule_.alphabet_size; ++i) {
        os << "  [";
        for (int j = 0; j < rule_.alphabet_size; ++j) os << (j ? " " : "") << matrix_(i, j);
        os << "]\n";
    }
    os << "primitive: yes\n";
    os << "lambda (PF): " << sig15(pf_.lambda) << "\n";
    os << "fixed power p=" << seed_.power << ", seed " << rule_.letter(seed_.seed.left) << "|"
       << rule_.letter(seed_.seed.right) << "\n";
    os << "lengths (" << scaling_note_ << "):";
    for (const auto& l : lengths_) os << " " << pretty_element(l);
    os << "\n";
    return os.str();
}

std::string System::field_report_text() const {
    std::ostringstream os;
    os << "rule: " << rule_.name << "\n";
    os << "characteristic polynomial: " << charpoly_.to_string() << "\n";
    os << "minimal polynomial: " << field_->minpoly().to_string() << "\n";
    os << "degree d: " << field_->degree() << " (internal dimension " << field_->degree() - 1 << ")\n";
    os << "lambda: " << sig15(field_->lambda()) << "\n";
    const auto& rr = field_->real_roots();
    for (size_t i = 1; i < rr.size(); ++i) os << "real conjugate: " << sig15(static_cast<double>(rr[i])) << "\n";
    for (const auto& z : field_->complex_roots())
        os << "complex conjugate: " << sig15(static_cast<double>(z.real())) << " + " << sig15(static_cast<double>(z.imag()))
           << "i\n";
    os << "det(B): " << sig15(field_->det_basis()) << "\n";
    os << "contraction spectral radius: " << sig15(field_->contraction_radius()) << "\n";
    const FieldElement& theta = field_->fourier_generator();
    os << "theta = " << pretty_element(theta) << " = " << sig15(theta.real_value()) << "\n";
    os << "Fourier module: L* = theta Z[L]\n";
    return os.str();
}

std::string System::field_report_json() const {
    json j;
    j["rule"] = rule_.name;
    json mp = json::array();
    for (const auto& c : field_->minpoly().c) mp.push_back(c.get_str());
    j["minpoly"] = mp;
    j["minpoly_str"] = field_->minpoly().to_string();
    j["lambda"] = sig15(field_->lambda());
    json roots = json::array();
    const auto& rr = field_->real_roots();
    for (size_t i = 0; i < rr.size(); ++i) roots.push_back({{"re", sig15(static_cast<double>(rr[i]))}, {"im", 0.0}});
    for (const auto& z : field_->complex_roots())
        roots.push_back({{"re", sig15(static_cast<double>(z.real()))}, {"im", sig15(static_cast<double>(z.imag()))}});
    j["roots"] = roots;
    j["det_B"] = sig15(field_->det_basis());
    j["theta"] = element_json(field_->fourier_generator());
    j["contraction_radius"] = sig15(field_->contraction_radius());
    j["B"] = matrix_json(field_->basis_matrix());
    j["B_star"] = matrix_json(field_->dual_basis_matrix());
    j["Q"] = matrix_json(field_->contraction());
    return j.dump(2) + "\n";
}

std::string System::windows_summary_json() {
    const WindowSolution& w = windows();
    json j;
    j["rule"] = rule_.name;
    j["internal_dim"] = w.internal_dim;
    j["exact"] = w.exact;
    json vols = json::array();
    for (size_t i = 0; i < w.volumes.size(); ++i) {
        json v;
        v["letter"] = rule_.letter(static_cast<int>(i));
        v["volume"] = sig15(w.volumes[i]);
        v["stderr"] = sig15(w.volume_stderr[i]);
        if (!w.exact_volumes.empty()) v["exact"] = pretty_element(w.exact_volumes[i]);
        vols.push_back(v);
    }
    j["volumes"] = vols;
    j["eta"] = sig15(w.eta);
    j["eta_max_rel_dev"] = sig15(w.eta_max_rel_dev);
    json cov;
    cov["constant"] = w.covering.constant;
    cov["degree"] = w.covering.degree;
    cov["modal_mass_fraction"] = sig15(w.covering.modal_mass_fraction);
    json hist = json::array();
    for (const auto& [lv, ms] : w.covering.histogram) hist.push_back({{"level", lv}, {"measure", sig15(ms)}});
    cov["histogram"] = hist;
    if (w.covering.step) {
        json st;
        json xs = json::array(), lv = json::array(), ex = json::array();
        for (size_t i = 0; i < w.covering.step->x.size(); ++i) {
            xs.push_back(sig15(w.covering.step->x[i]));
            ex.push_back(w.covering.step->x_exact[i] ? json(pretty_element(*w.covering.step->x_exact[i])) : json());
        }
        for (int l : w.covering.step->level) lv.push_back(l);
        st["x"] = xs;
        st["x_exact"] = ex;
        st["level"] = lv;
        cov["step"] = st;
    }
    j["covering"] = cov;
    if (w.internal_dim == 1) {
        json wins = json::array();
        for (size_t i = 0; i < w.interval_windows.size(); ++i) {
            json parts = json::array();
            for (const auto& p : w.interval_windows[i].parts) {
                json pp;
                pp["lo"] = sig15(p.lo);
                pp["hi"] = sig15(p.hi);
                if (p.lo_exact) pp["lo_exact"] = pretty_element(*p.lo_exact);
                if (p.hi_exact) pp["hi_exact"] = pretty_element(*p.hi_exact);
                parts.push_back(pp);
            }
            wins.push_back({{"letter", rule_.letter(static_cast<int>(i))}, {"intervals", parts}});
        }
        j["windows"] = wins;
    } else {
        json sizes = json::array();
        for (const auto& c : w.clouds) sizes.push_back(static_cast<long>(c.rows()));
        j["cloud_sizes"] = sizes;
        j["epsilon"] = sig15(w.epsilon_report);
    }
    j["iterations"] = w.iterations;
    j["residual"] = sig15(w.residual);
    j["mc_samples"] = w.mc_samples_used;
    j["notes"] = w.notes;
    j["scaling"] = scaling_note_;
    return j.dump(2) + "\n";
}

std::string System::windows_csv() {
    const WindowSolution& w = windows();
    std::ostringstream os;
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.15g", sig15(x));
        os << buf;
    };
    if (w.internal_dim == 1) {
        os << "letter,a,b\n";
        for (size_t i = 0; i < w.interval_windows.size(); ++i)
            for (const auto& p : w.interval_windows[i].parts) {
                os << rule_.letter(static_cast<int>(i)) << ",";
                put(p.lo);
                os << ",";
                put(p.hi);
                os << "\n";
            }
    } else {
        os << "letter,x,y\n";
        for (size_t i = 0; i < w.clouds.size(); ++i) {
            const auto& c = w.clouds[i];
            for (Eigen::Index r = 0; r < c.rows(); ++r) {
                os << rule_.letter(static_cast<int>(i)) << ",";
                put(c(r, 0));
                os << ",";
                put(c(r, 1));
                os << "\n";
            }
        }
    }
    return os.str();
}

std::string System::windows_svg() {
    return render_windows_svg(windows(), rule_);
}

std::string System::cocycle_json(const Eigen::VectorXd& y, double tol, int nmax) const {
    RieszResult rr = riesz_limit(spec_, y, pf_.v, tol, nmax);
    json j;
    j["rule"] = rule_.name;
    json yj = json::array();
    for (Eigen::Index i = 0; i < y.size(); ++i) yj.push_back(sig15(y(i)));
    j["y"] = yj;
    j["C"] = cmatrix_json(rr.C);
    j["c"] = cvector_json(rr.c);
    j["n_used"] = rr.n_used;
    j["residual"] = sig15(rr.residual);
    j["converged"] = rr.converged;
    j["first_singular"] = sig15(rr.first_singular);
    j["second_singular"] = sig15(rr.second_singular);
    j["rank1_ratio"] = sig15(rr.first_singular > 0 ? rr.second_singular / rr.first_singular : 0.0);
    j["theta"] = sig15(spec_.theta);
    return j.dump(2) + "\n";
}

std::string System::spectrum_json(const SpectrumTable& table) const {
    json j;
    j["rule"] = rule_.name;
    j["dens"] = sig15(table.dens_total);
    j["intensity_floor"] = sig15(table.intensity_floor);
    j["covering_constant"] = table.covering_constant;
    j["covering_degree"] = table.covering_degree;
    j["amplitude_formula"] = table.amplitude_formula;
    j["weights"] = cvector_json(table.weights);
    j["duplicate_k_flag"] = table.duplicate_k_flag;
    json rows = json::array();
    for (const auto& r : table.rows) {
        json row;
        row["miller"] = r.miller;
        row["k"] = sig15(r.k);
        json ks = json::array();
        for (Eigen::Index i = 0; i < r.kstar.size(); ++i) ks.push_back(sig15(r.kstar(i)));
        row["kstar"] = ks;
        row["amplitudes"] = cvector_json(r.amplitudes);
        row["intensity"] = sig15(r.intensity);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string System::oracle_json(const OracleReport& rep) const {
    json j;
    j["rule"] = rule_.name;
    j["k"] = sig15(rep.k);
    j["radius"] = sig15(rep.radius);
    j["brute"] = cvector_json(rep.brute);
    j["cocycle"] = cvector_json(rep.cocycle);
    j["deviation"] = sig15(rep.deviation);
    return j.dump(2) + "\n";
}

} // namespace spectra
