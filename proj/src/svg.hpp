#pragma once

#include "diffraction.hpp"
#include "windows.hpp"

#include <string>

namespace spectra {

struct SvgStyle {
    int width = 900;
    int height = 600;
    int max_labels = 8;                 // Miller labels on the tallest peaks
    std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"};
};

// Window figure: stacked interval unions (1D) or point-cloud scatter
// (internal dimension >= 2, first two coordinates), unit-tick axes.
std::string render_windows_svg(const WindowSolution& sol, const SubstitutionRule& rule, const SvgStyle& style = {});

// Diffraction figure: vertical peak lines, height proportional to intensity,
// Miller-index labels on the tallest peaks.
std::string render_spectrum_svg(const SpectrumTable& table, const SvgStyle& style = {});

} // namespace spectra
