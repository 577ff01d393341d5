#pragma once

#include <string>
#include <vector>

namespace qc {

// Minimal self-contained SVG polyline chart; no external renderer involved.
// Output is byte-deterministic for identical input.
struct LineSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LineSeries> series;
    bool log1p_x = false; // plot x through log10(1 + x) with decade ticks
    bool markers = true;  // draw a small circle at each point
};

std::string render_svg(const LinePlot& plot);
void write_svg(const LinePlot& plot, const std::string& path);

} // namespace qc
