#include "windows.hpp"

#include "errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace spectra {

double IntervalUnion::measure() const {
    double s = 0;
    for (const auto& p : parts) s += p.hi - p.lo;
    return s;
}

bool IntervalUnion::contains(double x, double tol) const {
    for (const auto& p : parts)
        if (x >= p.lo - tol && x <= p.hi + tol) return true;
    return false;
}

double IntervalUnion::distance(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : parts) {
        if (x < p.lo)
            best = std::min(best, p.lo - x);
        else if (x > p.hi)
            best = std::min(best, x - p.hi);
        else
            return 0;
    }
    return best;
}

namespace {

IntervalUnion merge_intervals(std::vector<ExactInterval> raw, double tol) {
    IntervalUnion u;
    if (raw.empty()) return u;
    std::sort(raw.begin(), raw.end(), [](const ExactInterval& a, const ExactInterval& b) { return a.lo < b.lo; });
    ExactInterval cur = raw.front();
    for (size_t i = 1; i < raw.size(); ++i) {
        const auto& nx = raw[i];
        if (nx.lo <= cur.hi + tol) {
            if (nx.hi > cur.hi) {
                cur.hi = nx.hi;
                cur.hi_exact = nx.hi_exact;
            }
        } else {
            u.parts.push_back(cur);
            cur = nx;
        }
    }
    u.parts.push_back(cur);
    return u;
}

double directed_hausdorff(const IntervalUnion& a, const IntervalUnion& b) {
    double h = 0;
    for (const auto& p : a.parts) {
        h = std::max(h, b.distance(p.lo));
        h = std::max(h, b.distance(p.hi));
    }
    for (size_t i = 0; i + 1 < b.parts.size(); ++i) {
        double mid = 0.5 * (b.parts[i].hi + b.parts[i + 1].lo);
        if (a.contains(mid)) h = std::max(h, b.distance(mid));
    }
    return h;
}

} // namespace

double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b) {
    if (a.parts.empty() || b.parts.empty()) return a.parts.empty() && b.parts.empty() ? 0 : std::numeric_limits<double>::infinity();
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

std::vector<std::vector<std::vector<Eigen::VectorXd>>> star_displacements(const Displacement& disp, const FieldPtr& field) {
    const int n = disp.size();
    std::vector<std::vector<std::vector<Eigen::VectorXd>>> out(static_cast<size_t>(n),
                                                               std::vector<std::vector<Eigen::VectorXd>>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& t : disp.entry[static_cast<size_t>(i)][static_cast<size_t>(j)])
                out[static_cast<size_t>(i)][static_cast<size_t>(j)].push_back(field->star_map(t));
    return out;
}

std::vector<IntervalUnion> apply_interval_ifs(const std::vector<std::vector<std::vector<double>>>& tstar, double q,
                                              const std::vector<IntervalUnion>& w, double merge_tol) {
    const int n = static_cast<int>(tstar.size());
    std::vector<IntervalUnion> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<ExactInterval> raw;
        for (int j = 0; j < n; ++j)
            for (double t : tstar[static_cast<size_t>(i)][static_cast<size_t>(j)])
                for (const auto& p : w[static_cast<size_t>(j)].parts) {
                    double a = q * p.lo + t;
                    double b = q * p.hi + t;
                    if (a > b) std::swap(a, b);
                    raw.push_back({a, b, std::nullopt, std::nullopt});
                }
        out[static_cast<size_t>(i)] = merge_intervals(std::move(raw), merge_tol);
    }
    return out;
}

std::vector<std::vector<Eigen::VectorXd>> hutchinson_cloud_step(
    const std::vector<std::vector<std::vector<Eigen::VectorXd>>>& tstar, const Eigen::MatrixXd& q,
    const std::vector<std::vector<Eigen::VectorXd>>& clouds) {
    const size_t n = tstar.size();
    std::vector<std::vector<Eigen::VectorXd>> out(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& t : tstar[i][j])
                for (const auto& p : clouds[j]) out[i].push_back(q * p + t);
    return out;
}

namespace {

// Snap table for 1D internal space: real values a + b*lambda for small
// integer a, b (window endpoints are real numbers in Q(lambda)).
struct SnapTable {
    std::vector<std::pair<double, std::pair<int, int>>> entries;
    FieldPtr field;

    explicit SnapTable(const FieldPtr& f) : field(f) {
        const double lam = f->lambda();
        for (int a = -8; a <= 8; ++a)
            for (int b = -8; b <= 8; ++b) entries.push_back({a + b * lam, {a, b}});
        std::sort(entries.begin(), entries.end());
    }

    std::optional<FieldElement> snap(double x, double tol = 1e-10) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(x, std::make_pair(0, 0)));
        for (auto cand : {it, it == entries.begin() ? it : std::prev(it)}) {
            if (cand == entries.end()) continue;
            if (std::abs(cand->first - x) < tol) {
                std::vector<Rat> c(static_cast<size_t>(field->degree()), Rat(0));
                c[0] = cand->second.first;
                c[1] = cand->second.second;
                return field->element(std::move(c));
            }
        }
        return std::nullopt;
    }
};

struct Breakpoint {
    double x;
    std::optional<FieldElement> exact;
};

void solve_interval_engine(const Displacement& disp, const FieldPtr& field, const WindowOptions& opt, WindowSolution& sol) {
    const int n = disp.size();
    const double q = static_cast<double>(field->real_roots()[1]);
    if (std::abs(q) >= 1) throw ValidationError("solve_windows: internal contraction is not contractive");

    std::vector<std::vector<std::vector<double>>> tstar(static_cast<size_t>(n),
                                                        std::vector<std::vector<double>>(static_cast<size_t>(n)));
    double tmax = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const auto& t : disp.entry[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                double ts = field->star_map(t)(0);
                tstar[static_cast<size_t>(i)][static_cast<size_t>(j)].push_back(ts);
                tmax = std::max(tmax, std::abs(ts));
            }

    const double r0 = tmax / (1 - std::abs(q)) + 1.0;
    std::vector<IntervalUnion> w(static_cast<size_t>(n));
    for (auto& u : w) u.parts = {{-r0, r0, std::nullopt, std::nullopt}};

    double hd = 0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        auto next = apply_interval_ifs(tstar, q, w, 1e-12);
        hd = 0;
        for (int i = 0; i < n; ++i) hd = std::max(hd, hausdorff_distance(next[static_cast<size_t>(i)], w[static_cast<size_t>(i)]));
        w = std::move(next);
        if (hd < opt.tol) break;
    }
    if (hd >= opt.tol) throw ConvergenceError("solve_windows: interval iteration cap reached before tolerance");

    // Snap endpoints to low-height Z[lambda] elements.
    SnapTable snap(field);
    bool all_exact = true;
    for (auto& u : w)
        for (auto& p : u.parts) {
            p.lo_exact = snap.snap(p.lo);
            p.hi_exact = snap.snap(p.hi);
            if (p.lo_exact) p.lo = p.lo_exact->real_value();
            if (p.hi_exact) p.hi = p.hi_exact->real_value();
            all_exact = all_exact && p.lo_exact && p.hi_exact;
        }

    sol.interval_windows = std::move(w);
    sol.exact = all_exact;
    sol.iterations = it + 1;
    sol.residual = hd;
    sol.volumes.resize(static_cast<size_t>(n));
    sol.volume_stderr.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) sol.volumes[static_cast<size_t>(i)] = sol.interval_windows[static_cast<size_t>(i)].measure();
    if (all_exact) {
        for (int i = 0; i < n; ++i) {
            FieldElement v = field->zero();
            for (const auto& p : sol.interval_windows[static_cast<size_t>(i)].parts) v = v + (*p.hi_exact - *p.lo_exact);
            sol.exact_volumes.push_back(v);
        }
    }

    // Exact step-function covering profile.
    std::vector<Breakpoint> bps;
    for (const auto& u : sol.interval_windows)
        for (const auto& p : u.parts) {
            bps.push_back({p.lo, p.lo_exact});
            bps.push_back({p.hi, p.hi_exact});
        }
    std::sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });
    std::vector<Breakpoint> uniq;
    for (const auto& b : bps) {
        if (!uniq.empty() && b.x - uniq.back().x < 1e-12) {
            if (!uniq.back().exact && b.exact) uniq.back().exact = b.exact;
            continue;
        }
        uniq.push_back(b);
    }
    StepProfile prof;
    std::map<int, double> levels;
    for (size_t s = 0; s + 1 < uniq.size(); ++s) {
        double mid = 0.5 * (uniq[s].x + uniq[s + 1].x);
        int level = 0;
        for (const auto& u : sol.interval_windows)
            if (u.contains(mid)) ++level;
        if (level > n) throw ValidationError("covering function exceeds the alphabet size (internal)");
        if (level > 0) levels[level] += uniq[s + 1].x - uniq[s].x;
        if (prof.level.empty() || prof.level.back() != level) {
            prof.x.push_back(uniq[s].x);
            prof.x_exact.push_back(uniq[s].exact);
            prof.level.push_back(level);
        }
    }
    if (!uniq.empty()) {
        prof.x.push_back(uniq.back().x);
        prof.x_exact.push_back(uniq.back().exact);
    }
    sol.covering.step = std::move(prof);
    for (const auto& [lv, ms] : levels) sol.covering.histogram.push_back({lv, ms});
    double support_mass = 0, modal_mass = 0;
    int modal = 1;
    for (const auto& [lv, ms] : levels) {
        support_mass += ms;
        if (ms > modal_mass) {
            modal_mass = ms;
            modal = lv;
        }
    }
    sol.covering.modal_mass_fraction = support_mass > 0 ? modal_mass / support_mass : 1.0;
    sol.covering.constant = levels.size() == 1;
    sol.covering.degree = modal;
}

} // namespace

IfsMembership::IfsMembership(const Displacement& disp, const FieldPtr& field, int depth) {
    n_ = disp.size();
    dim_ = field->degree() - 1;
    tstar_ = star_displacements(disp, field);
    Eigen::MatrixXd q = field->contraction();
    qinv_ = q.inverse();
    double tmax = 0;
    for (const auto& pi : tstar_)
        for (const auto& cell : pi)
            for (const auto& t : cell) tmax = std::max(tmax, t.norm());
    double theta = field->contraction_radius();
    radius_ = tmax / (1 - theta) + 1e-9;
    if (depth > 0) {
        depth_ = depth;
    } else {
        double target = 1e-6 / std::max(1.0, 2 * radius_);
        depth_ = static_cast<int>(std::ceil(std::log(target) / std::log(theta)));
        depth_ = std::clamp(depth_, 30, 600);
    }
}

bool IfsMembership::contains(int letter, const Eigen::VectorXd& y) const {
    if (y.norm() > radius_) return false;
    struct Frame {
        int letter;
        Eigen::VectorXd x;
        int depth;
    };
    std::vector<Frame> stack;
    stack.push_back({letter, y, 0});
    long budget = 200000;
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.depth == depth_) return true;
        if (--budget <= 0) return true; // conservative on pathological branching
        for (int j = 0; j < n_; ++j) {
            for (const auto& t : tstar_[static_cast<size_t>(f.letter)][static_cast<size_t>(j)]) {
                Eigen::VectorXd x = qinv_ * (f.x - t);
                if (x.norm() <= radius_) stack.push_back({j, std::move(x), f.depth + 1});
            }
        }
    }
    return false;
}

int IfsMembership::covering_count(const Eigen::VectorXd& y) const {
    int c = 0;
    for (int i = 0; i < n_; ++i)
        if (contains(i, y)) ++c;
    return c;
}

namespace {

void solve_cloud_engine(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field,
                        const WindowOptions& opt, WindowSolution& sol) {
    const int n = disp.size();
    const int dim = field->degree() - 1;

    // Star-mapped exact patch as the cloud (uniformly distributed in W_i).
    FixedSeed fs = find_fixed_power_and_seed(rule);
    TypedPointSet patch = iterate_patch(rule, disp, field, fs.seed, 0);
    std::size_t total_cap = 5'000'000;
    for (int guard = 0; guard < 100; ++guard) {
        std::size_t minc = SIZE_MAX;
        for (const auto& pts : patch.points) minc = std::min(minc, pts.size());
        if (minc >= opt.target_points || patch.total_points() > total_cap) break;
        for (int k = 0; k < fs.power; ++k) patch = inflate_patch(disp, field, patch);
    }
    sol.clouds.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& pts = patch.points[static_cast<size_t>(i)];
        if (pts.empty()) throw ConvergenceError("solve_windows: empty letter cloud");
        Eigen::MatrixXd cloud(static_cast<Eigen::Index>(pts.size()), dim);
        for (size_t k = 0; k < pts.size(); ++k) cloud.row(static_cast<Eigen::Index>(k)) = field->star_map_int(pts[k]).transpose();
        sol.clouds[static_cast<size_t>(i)] = std::move(cloud);
    }

    // Diagnostic nearest-neighbour scale (sampled).
    {
        const auto& cloud = sol.clouds[0];
        const Eigen::Index m = cloud.rows();
        std::uint64_t st = opt.rng_seed ^ 0x9e37ULL;
        std::vector<double> nn;
        Eigen::Index sample = std::min<Eigen::Index>(m, 512);
        for (Eigen::Index s = 0; s < sample; ++s) {
            Eigen::Index i = static_cast<Eigen::Index>(splitmix64(st) % static_cast<std::uint64_t>(m));
            double best = std::numeric_limits<double>::infinity();
            Eigen::Index stride = std::max<Eigen::Index>(1, m / 20000);
            for (Eigen::Index j = 0; j < m; j += stride) {
                if (j == i) continue;
                best = std::min(best, (cloud.row(i) - cloud.row(j)).norm());
            }
            nn.push_back(best);
        }
        std::sort(nn.begin(), nn.end());
        sol.epsilon_report = nn.empty() ? 0.0 : 2 * nn[nn.size() / 2];
    }

    // Per-letter outer bounding boxes from box iteration.
    IfsMembership oracle(disp, field);
    auto tstar = star_displacements(disp, field);
    Eigen::MatrixXd q = field->contraction();
    Eigen::MatrixXd qabs = q.cwiseAbs();
    std::vector<Eigen::VectorXd> lo(static_cast<size_t>(n), Eigen::VectorXd::Constant(dim, -oracle.bounding_radius()));
    std::vector<Eigen::VectorXd> hi(static_cast<size_t>(n), Eigen::VectorXd::Constant(dim, oracle.bounding_radius()));
    for (int it = 0; it < 400; ++it) {
        std::vector<Eigen::VectorXd> nlo(static_cast<size_t>(n)), nhi(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd l = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());
            Eigen::VectorXd h = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
            for (int j = 0; j < n; ++j)
                for (const auto& t : tstar[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                    Eigen::VectorXd c = 0.5 * (lo[static_cast<size_t>(j)] + hi[static_cast<size_t>(j)]);
                    Eigen::VectorXd hw = 0.5 * (hi[static_cast<size_t>(j)] - lo[static_cast<size_t>(j)]);
                    Eigen::VectorXd nc = q * c + t;
                    Eigen::VectorXd nh = qabs * hw;
                    l = l.cwiseMin(nc - nh);
                    h = h.cwiseMax(nc + nh);
                }
            nlo[static_cast<size_t>(i)] = l;
            nhi[static_cast<size_t>(i)] = h;
        }
        lo = std::move(nlo);
        hi = std::move(nhi);
    }

    // Monte-Carlo volumes per letter (deterministic block RNG).
    const std::uint64_t n_samples = std::max<std::uint64_t>(opt.mc_samples, 1000);
    const int blocks = 64;
    sol.volumes.assign(static_cast<size_t>(n), 0.0);
    sol.volume_stderr.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd span = hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)];
        double boxvol = span.prod();
        std::vector<std::uint64_t> hits(blocks, 0), cnt(blocks, 0);
        parallel_blocks(blocks, opt.threads, [&](int b) {
            std::uint64_t st = opt.rng_seed + 1315423911ULL * static_cast<std::uint64_t>(b + 1) + 77777ULL * static_cast<std::uint64_t>(i);
            std::uint64_t per = n_samples / blocks + 1;
            Eigen::VectorXd y(dim);
            for (std::uint64_t s = 0; s < per; ++s) {
                for (int c = 0; c < dim; ++c) y(c) = lo[static_cast<size_t>(i)](c) + span(c) * uniform01(st);
                cnt[static_cast<size_t>(b)]++;
                if (oracle.contains(i, y)) hits[static_cast<size_t>(b)]++;
            }
        });
        double htot = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}));
        double ctot = static_cast<double>(std::accumulate(cnt.begin(), cnt.end(), std::uint64_t{0}));
        double p = htot / ctot;
        sol.volumes[static_cast<size_t>(i)] = boxvol * p;
        sol.volume_stderr[static_cast<size_t>(i)] = boxvol * std::sqrt(std::max(p * (1 - p), 1.0 / ctot) / ctot);
        sol.mc_samples_used += static_cast<std::uint64_t>(ctot);
    }

    // Covering histogram over the union box.
    {
        Eigen::VectorXd ulo = lo[0], uhi = hi[0];
        for (int i = 1; i < n; ++i) {
            ulo = ulo.cwiseMin(lo[static_cast<size_t>(i)]);
            uhi = uhi.cwiseMax(hi[static_cast<size_t>(i)]);
        }
        Eigen::VectorXd span = uhi - ulo;
        double boxvol = span.prod();
        std::vector<std::vector<std::uint64_t>> level_hits(blocks, std::vector<std::uint64_t>(static_cast<size_t>(n) + 1, 0));
        std::vector<std::uint64_t> cnt(blocks, 0);
        parallel_blocks(blocks, opt.threads, [&](int b) {
            std::uint64_t st = opt.rng_seed + 2654435761ULL * static_cast<std::uint64_t>(b + 17);
            std::uint64_t per = n_samples / blocks + 1;
            Eigen::VectorXd y(dim);
            for (std::uint64_t s = 0; s < per; ++s) {
                for (int c = 0; c < dim; ++c) y(c) = ulo(c) + span(c) * uniform01(st);
                cnt[static_cast<size_t>(b)]++;
                int mc = oracle.covering_count(y);
                level_hits[static_cast<size_t>(b)][static_cast<size_t>(mc)]++;
            }
        });
        double ctot = 0;
        std::vector<double> perlevel(static_cast<size_t>(n) + 1, 0);
        for (int b = 0; b < blocks; ++b) {
            ctot += static_cast<double>(cnt[static_cast<size_t>(b)]);
            for (int lv = 0; lv <= n; ++lv) perlevel[static_cast<size_t>(lv)] += static_cast<double>(level_hits[static_cast<size_t>(b)][static_cast<size_t>(lv)]);
        }
        double support = 0, modal_mass = 0;
        int modal = 1;
        for (int lv = 1; lv <= n; ++lv) {
            double ms = boxvol * perlevel[static_cast<size_t>(lv)] / ctot;
            if (ms <= 0) continue;
            sol.covering.histogram.push_back({lv, ms});
            support += ms;
            if (ms > modal_mass) {
                modal_mass = ms;
                modal = lv;
            }
        }
        sol.covering.modal_mass_fraction = support > 0 ? modal_mass / support : 1.0;
        sol.covering.constant = sol.covering.modal_mass_fraction >= 0.999;
        sol.covering.degree = modal;
        sol.mc_samples_used += static_cast<std::uint64_t>(ctot);
    }
    sol.iterations = oracle.depth();
    sol.notes = "cloud engine: inverse-IFS membership, depth " + std::to_string(oracle.depth()) +
                ", reported epsilon " + std::to_string(sol.epsilon_report);
}

} // namespace

WindowSolution solve_windows(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field,
                             const Eigen::VectorXd& pf_v, const WindowOptions& opt) {
    WindowSolution sol;
    sol.internal_dim = field->degree() - 1;
    if (sol.internal_dim < 1) throw ValidationError("solve_windows: internal space is trivial (degree-1 field)");
    if (sol.internal_dim == 1)
        solve_interval_engine(disp, field, opt, sol);
    else
        solve_cloud_engine(rule, disp, field, opt, sol);

    const int n = disp.size();
    double eta = 0;
    for (double v : sol.volumes) eta += v; // sum vol_i = eta * sum v_i = eta
    sol.eta = eta;
    double maxdev = 0;
    for (int i = 0; i < n; ++i) maxdev = std::max(maxdev, std::abs(sol.volumes[static_cast<size_t>(i)] / pf_v(i) - eta) / eta);
    sol.eta_max_rel_dev = maxdev;
    return sol;
}

} // namespace spectra
