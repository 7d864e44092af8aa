#pragma once

#include "numberfield.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spectra {

// Symbolic substitution rule on an alphabet of single-codepoint letters.
struct SubstitutionRule {
    int alphabet_size = 0;
    std::vector<std::string> letters;        // display forms, UTF-8
    std::vector<std::vector<int>> images;    // letter indices
    std::string name = "rule";

    const std::string& letter(int i) const { return letters[static_cast<size_t>(i)]; }
    std::string word_string(const std::vector<int>& w) const;
};

// One parsed rule file: the rule plus an optional lengths override, given as
// integer polynomials in L (the inflation factor).
struct RuleFile {
    SubstitutionRule rule;
    std::optional<std::vector<std::vector<Int>>> length_override;
};

RuleFile parse_rule(const std::string& text);

IntMatrix substitution_matrix(const SubstitutionRule& rule);

// Primitivity via boolean powers of the positivity pattern, up to the
// Wielandt bound N^2 - 2N + 2.
bool is_primitive(const IntMatrix& m);

struct PFData {
    double lambda = 0;
    Eigen::VectorXd v;   // right eigenvector, <1|v> = 1
    Eigen::VectorXd u;   // left eigenvector, <u|v> = 1
    Eigen::MatrixXd P;   // v u^T
    double residual = 0; // max of the three normalisation/eigen residuals
};

PFData pf_eigendata(const IntMatrix& m, double tol = 1e-12);

// Natural interval lengths: exact left PF eigenvector direction, normalised
// so the shortest length is 1 when that lies in Z[lambda] (fallback: cleared
// denominators, content 1). Verified Z[lambda]-generating via Smith form.
struct NaturalLengths {
    std::vector<FieldElement> lengths;
    std::string scaling_note;
};

NaturalLengths natural_lengths(const SubstitutionRule& rule, const FieldPtr& field);

// Exact right PF eigenvector over Q(lambda), normalised <1|v> = 1 (the
// letter frequencies).
std::vector<FieldElement> exact_right_eigenvector(const SubstitutionRule& rule, const FieldPtr& field);

// Set-valued displacement matrix: entry (i,j) lists the left endpoints of the
// letter-i tiles inside the inflated letter-j tile. Exact; the layout must
// tile [0, lambda * len_j) without gaps, which is checked.
struct Displacement {
    std::vector<std::vector<std::vector<FieldElement>>> entry; // [i][j] -> positions
    std::vector<FieldElement> lengths;

    int size() const { return static_cast<int>(entry.size()); }
};

Displacement displacement_matrix(const SubstitutionRule& rule, const std::vector<FieldElement>& lengths);

// Control points with exact integer power-basis coordinates.
using PointCoord = std::array<std::int64_t, kMaxFieldDegree>;

struct TypedPointSet {
    FieldPtr field;
    std::vector<std::vector<PointCoord>> points; // per letter, sorted by real value
    double radius = 0;                           // [-radius, radius] is covered

    std::size_t total_points() const;
};

// Two-letter seed x|y: tile x ends at 0, tile y starts at 0.
struct Seed {
    int left = 0;
    int right = 0;
};

TypedPointSet initial_patch(const Displacement& disp, const FieldPtr& field, Seed seed);
TypedPointSet iterate_patch(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field, Seed seed, int n);
// One inflation step.
TypedPointSet inflate_patch(const Displacement& disp, const FieldPtr& field, const TypedPointSet& patch);
// Iterate in steps of `power` until the patch covers [-r, r].
TypedPointSet patch_to_radius(const SubstitutionRule& rule, const Displacement& disp, const FieldPtr& field, Seed seed,
                              int power, double r);

// Expand the image word of rho^n applied to one letter.
std::vector<int> substitute_word(const SubstitutionRule& rule, int letter, int n);

struct FixedSeed {
    int power = 0;
    Seed seed;
};

// Smallest p <= N^2 with a legal two-letter seed fixed under rho^p.
FixedSeed find_fixed_power_and_seed(const SubstitutionRule& rule);

bool seed_is_legal(const SubstitutionRule& rule, Seed seed);

} // namespace spectra
