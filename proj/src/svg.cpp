#include "collapse/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "collapse/distributions.hpp"

namespace collapse {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 700.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 500.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded_range(double lo, double hi) {
    if (lo > hi) std::swap(lo, hi);
    double span = hi - lo;
    if (span == 0.0) span = std::abs(hi) > 0.0 ? std::abs(hi) * 0.1 : 1.0;
    return Range{lo - 0.05 * span, hi + 0.05 * span};
}

// 1/2/5 progression producing 4-9 ticks.
std::vector<double> linear_ticks(const Range& r) {
    const double span = r.hi - r.lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10.0) step *= 2.0;
    if (span / step > 10.0) step *= 2.5;
    if (span / step > 10.0) step *= 2.0;
    std::vector<double> ticks;
    const double first = std::ceil(r.lo / step) * step;
    for (double t = first; t <= r.hi + 1e-12 * span; t += step) {
        // snap tiny float residue to zero
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    }
    return ticks;
}

std::vector<double> log_ticks(const Range& r) {
    std::vector<double> ticks;
    const int lo = static_cast<int>(std::floor(r.lo));
    const int hi = static_cast<int>(std::ceil(r.hi));
    for (int e = lo; e <= hi; ++e) {
        if (e >= r.lo - 1e-12 && e <= r.hi + 1e-12) ticks.push_back(static_cast<double>(e));
    }
    return ticks;
}

}  // namespace

std::string render_line_chart(const std::vector<PlotSeries>& series,
                              const PlotOptions& options) {
    if (series.empty()) throw UsageError("cannot render a chart without series");

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -std::numeric_limits<double>::infinity();
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -std::numeric_limits<double>::infinity();
    bool any_point = false;
    for (const PlotSeries& s : series) {
        for (const auto& [x, y] : s.points) {
            double vx = x;
            if (options.log_x) {
                if (!(x > 0.0))
                    throw UsageError("log x-axis requires positive x values");
                vx = std::log10(x);
            }
            x_lo = std::min(x_lo, vx);
            x_hi = std::max(x_hi, vx);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
            any_point = true;
        }
    }
    if (!any_point) throw UsageError("cannot render a chart without points");

    const Range xr = padded_range(x_lo, x_hi);
    const Range yr = padded_range(y_lo, y_hi);
    const auto px = [&](double v) {
        const double t = (v - xr.lo) / (xr.hi - xr.lo);
        return kLeft + t * (kRight - kLeft);
    };
    const auto py = [&](double v) {
        const double t = (v - yr.lo) / (yr.hi - yr.lo);
        return kBottom - t * (kBottom - kTop);
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
        << fmt(kRight) << "\" y2=\"" << fmt(kBottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (double t : options.log_x ? log_ticks(xr) : linear_ticks(xr)) {
        const double x = px(t);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(kBottom + 5) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        const std::string label = options.log_x ? ("1e" + fmt_tick(t)) : fmt_tick(t);
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kBottom + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << escape_text(label) << "</text>\n";
    }
    for (double t : linear_ticks(yr)) {
        const double y = py(t);
        out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(kLeft) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt(kLeft - 9) << "\" y=\"" << fmt(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << fmt_tick(t) << "</text>\n";
    }

    if (!options.title.empty())
        out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kTop - 18)
            << "\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">"
            << escape_text(options.title) << "</text>\n";
    if (!options.x_label.empty())
        out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kBottom + 42)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
            << escape_text(options.x_label) << "</text>\n";
    if (!options.y_label.empty())
        out << "<text x=\"18\" y=\"" << fmt((kTop + kBottom) / 2)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
            << " transform=\"rotate(-90 18 " << fmt((kTop + kBottom) / 2) << ")\">"
            << escape_text(options.y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        std::vector<std::pair<double, double>> pts = series[s].points;
        if (options.log_x)
            for (auto& [x, y] : pts) x = std::log10(x);
        std::sort(pts.begin(), pts.end());
        if (pts.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.6\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i) out << ' ';
                out << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
            }
            out << "\"/>\n";
        }
        if (options.markers || pts.size() == 1) {
            for (const auto& [x, y] : pts)
                out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
                    << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
    }

    // legend
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double y = kTop + 14.0 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << fmt(kRight + 16) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(kRight + 44) << "\" y2=\"" << fmt(y) << "\" stroke=\""
            << kPalette[s % kPaletteSize] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(kRight + 50) << "\" y=\"" << fmt(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape_text(series[s].label) << "</text>\n";
    }

    out << "</svg>\n";
    return out.str();
}

}  // namespace collapse
