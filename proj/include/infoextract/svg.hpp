#pragma once

#include <string>
#include <vector>

namespace infoextract::svg {

struct SvgSeries {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

/// Standalone 800x500 line plot: axes with tick labels, one polyline per
/// series, legend. Byte output is a pure function of the inputs.
void emit_svg_lineplot(const std::vector<SvgSeries>& series, const std::string& path,
                       const std::string& title = "", bool allow_overwrite = false);

struct ScatterPanel {
    std::string title;
    std::vector<double> xs;
    std::vector<double> ys;
};

/// Standalone 800x500 scatter figure with 1 or 2 panels side by side
/// (the before/after layout).
void emit_svg_scatter(const std::vector<ScatterPanel>& panels, const std::string& path,
                      bool allow_overwrite = false);

}  // namespace infoextract::svg
