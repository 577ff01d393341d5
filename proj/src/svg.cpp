#include "qc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qc/csv.hpp"

namespace qc {

namespace {

constexpr int kWidth = 880;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 42;
constexpr int kMarginBottom = 58;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

double nice_step(double range) {
    if (!(range > 0.0))
        return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5)
        return mag;
    if (r < 3.5)
        return 2.0 * mag;
    if (r < 7.5)
        return 5.0 * mag;
    return 10.0 * mag;
}

} // namespace

std::string render_svg(const LinePlot& plot) {
    const auto tx = [&](double x) { return plot.log1p_x ? std::log10(1.0 + x) : x; };

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const auto& s : plot.series) {
        for (double x : s.x) {
            x_lo = std::min(x_lo, tx(x));
            x_hi = std::max(x_hi, tx(x));
        }
        for (double y : s.y) {
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!(x_lo < x_hi)) {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if (!(y_lo < y_hi)) {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) {
        return kMarginLeft + (tx(x) - x_lo) / (x_hi - x_lo) * plot_w;
    };
    const auto py = [&](double y) {
        return kMarginTop + (y_hi - y) / (y_hi - y_lo) * plot_h;
    };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kWidth) + "\" height=\"" +
           std::to_string(kHeight) + "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"24\" font-size=\"16\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">" + plot.title + "</text>\n";

    // Axes.
    const double x0 = kMarginLeft, x1 = kMarginLeft + plot_w;
    const double y0 = kMarginTop + plot_h, y1 = kMarginTop;
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) +
           "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) +
           "\" y2=\"" + num(y1) + "\" stroke=\"black\"/>\n";

    // X ticks: decades for the log1p axis, a nice linear grid otherwise.
    std::vector<double> x_ticks;
    if (plot.log1p_x) {
        x_ticks.push_back(0.0);
        for (double v = 1.0; tx(v) <= x_hi + 1e-12; v *= 10.0)
            x_ticks.push_back(v);
    } else {
        const double step = nice_step(x_hi - x_lo);
        for (double v = std::ceil(x_lo / step) * step; v <= x_hi + 1e-12 * step; v += step)
            x_ticks.push_back(v);
    }
    for (double v : x_ticks) {
        const double x = px(v);
        if (x < x0 - 0.5 || x > x1 + 0.5)
            continue;
        svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) +
               "\" y2=\"" + num(y0 + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(y0 + 20) +
               "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" +
               tick_label(v) + "</text>\n";
    }

    const double y_step = nice_step(y_hi - y_lo);
    for (double v = std::ceil(y_lo / y_step) * y_step; v <= y_hi + 1e-12 * y_step;
         v += y_step) {
        const double y = py(v);
        if (y < y1 - 0.5 || y > y0 + 0.5)
            continue;
        svg += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x0) +
               "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
        svg += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x1) +
               "\" y2=\"" + num(y) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(x0 - 9) + "\" y=\"" + num(y + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" +
               tick_label(v) + "</text>\n";
    }

    svg += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" +
           num(kHeight - 14) + "\" font-size=\"13\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">" + plot.x_label + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(kMarginTop + plot_h / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 " + num(kMarginTop + plot_h / 2) + ")\">" +
           plot.y_label + "</text>\n";

    // Series polylines and legend.
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const auto& series = plot.series[s];
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (std::size_t k = 0; k < series.x.size(); ++k) {
            if (k)
                points += ' ';
            points += num(px(series.x[k])) + "," + num(py(series.y[k]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        if (plot.markers) {
            for (std::size_t k = 0; k < series.x.size(); ++k)
                svg += "<circle cx=\"" + num(px(series.x[k])) + "\" cy=\"" +
                       num(py(series.y[k])) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        const double ly = kMarginTop + 14 + 18 * static_cast<double>(s);
        svg += "<line x1=\"" + num(x1 + 12) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(x1 + 34) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(x1 + 40) + "\" y=\"" + num(ly) +
               "\" font-size=\"12\" font-family=\"sans-serif\">" + series.name +
               "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void write_svg(const LinePlot& plot, const std::string& path) {
    write_text_file(render_svg(plot), path);
}

} // namespace qc
