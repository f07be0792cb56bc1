#pragma once

#include <string>
#include <utility>
#include <vector>

namespace collapse {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool markers = false;  // circle per point; lone points always get one
};

// Self-contained SVG line chart. Axis ranges come from the data extrema
// padded by 5%, so identical input produces identical bytes.
std::string render_line_chart(const std::vector<PlotSeries>& series,
                              const PlotOptions& options);

}  // namespace collapse
