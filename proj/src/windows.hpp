#pragma once

#include "substitution.hpp"

#include <functional>
#include <optional>

namespace spectra {

struct WindowOptions {
    double tol = 1e-12;             // Hausdorff stopping distance, interval engine
    int max_iter = 600;
    std::size_t target_points = 20000; // cloud points per letter
    std::uint64_t mc_samples = 400000; // Monte-Carlo samples per letter
    int threads = 1;
    std::uint64_t rng_seed = 0x5eedULL;
};

struct ExactInterval {
    double lo = 0, hi = 0;
    std::optional<FieldElement> lo_exact, hi_exact;
};

struct IntervalUnion {
    std::vector<ExactInterval> parts; // sorted, disjoint
    double measure() const;
    bool contains(double x, double tol = 0) const;
    double distance(double x) const;
};

double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b);

// Step function m_c on internal space (1D exact engine only).
struct StepProfile {
    std::vector<double> x;                             // breakpoints, size m+1
    std::vector<std::optional<FieldElement>> x_exact;  // parallel to x
    std::vector<int> level;                            // size m, level between breakpoints
};

struct CoveringProfile {
    std::vector<std::pair<int, double>> histogram; // (level, measure), level ascending
    bool constant = false;
    int degree = 1;                 // covering degree when constant, else modal level
    double modal_mass_fraction = 1; // fraction of the support mass on the modal level
    std::optional<StepProfile> step;
};

struct WindowSolution {
    int internal_dim = 1;

    // Interval engine (internal dimension 1).
    std::vector<IntervalUnion> interval_windows;

    // Cloud engine (internal dimension >= 2): rows are star-mapped points.
    std::vector<Eigen::MatrixXd> clouds;

    std::vector<double> volumes;
    std::vector<double> volume_stderr;       // zero in the exact engine
    std::vector<FieldElement> exact_volumes; // filled when every endpoint snapped
    bool exact = false;
    double eta = 0;
    double eta_max_rel_dev = 0; // max_i |vol_i/v_i - eta| / eta
    CoveringProfile covering;

    int iterations = 0;
    double residual = 0;        // last Hausdorff step (interval engine)
    double epsilon_report = 0;  // cloud nearest-neighbour scale (reported, diagnostic)
    std::uint64_t mc_samples_used = 0;
    std::string notes;
};

// Solve the window IFS W_i = U_j Q W_j + T*_ij for the given system and
// estimate volumes, eta and the covering profile.
WindowSolution solve_windows(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field,
                             const Eigen::VectorXd& pf_v, const WindowOptions& opt = {});

// Star-mapped displacement exponents; entry (i,j) is a list of (d-1)-vectors.
std::vector<std::vector<std::vector<Eigen::VectorXd>>> star_displacements(const Displacement& disp, const FieldPtr& field);

// One application of the interval Hutchinson map (for self-consistency tests).
std::vector<IntervalUnion> apply_interval_ifs(const std::vector<std::vector<std::vector<double>>>& tstar, double q,
                                              const std::vector<IntervalUnion>& w, double merge_tol = 1e-12);

// One Hutchinson step on point clouds (quick preview path; the solver itself
// prefers star-mapped exact patches).
std::vector<std::vector<Eigen::VectorXd>> hutchinson_cloud_step(
    const std::vector<std::vector<std::vector<Eigen::VectorXd>>>& tstar, const Eigen::MatrixXd& q,
    const std::vector<std::vector<Eigen::VectorXd>>& clouds);

// Membership oracle for the IFS attractor via bounded-depth inverse descent
// (internal dimension >= 2). Shareable across threads.
class IfsMembership {
public:
    IfsMembership(const Displacement& disp, const FieldPtr& field, int depth = 0);
    bool contains(int letter, const Eigen::VectorXd& y) const;
    int covering_count(const Eigen::VectorXd& y) const;
    double bounding_radius() const { return radius_; }
    int depth() const { return depth_; }

private:
    int n_ = 0;
    int dim_ = 0;
    int depth_ = 0;
    double radius_ = 0;
    Eigen::MatrixXd qinv_;
    std::vector<std::vector<std::vector<Eigen::VectorXd>>> tstar_;
};

} // namespace spectra
