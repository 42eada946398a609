#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lagdeconv/stats.hpp"

namespace lagdeconv::svg {

struct Line {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool markers = false;
};

namespace detail {
constexpr double kW = 640, kH = 400, kL = 60, kR = 20, kT = 30, kB = 45;

inline std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

inline void frame(std::ostream& out, const std::string& title, const std::string& schema) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<!-- schema: " << schema << " v1 -->\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" "
        << "font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << esc(title)
        << "</text>\n"
        << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

struct Range {
    double lo, hi;
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

inline Range pad(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (hi <= lo) return {lo - 0.5, hi + 0.5};
    const double p = 0.05 * (hi - lo);
    return {lo - p, hi + p};
}

inline void ticks(std::ostream& out, const Range& xr, const Range& yr, bool x_labels = true) {
    for (int i = 0; i <= 4; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        const double px = xr.map(xv, kL, kW - kR);
        const double py = yr.map(yv, kH - kB, kT);
        std::ostringstream lx, ly;
        lx.precision(3);
        ly.precision(3);
        lx << xv;
        ly << yv;
        if (x_labels) {
            out << "<text x=\"" << px << "\" y=\"" << kH - kB + 15 << "\" text-anchor=\"middle\">" << lx.str()
                << "</text>\n";
        }
        out << "<text x=\"" << kL - 5 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << ly.str() << "</text>\n";
    }
}
}  // namespace detail

/// Overlay of several curves on shared axes.
inline void line_plot(std::ostream& out, const std::string& title, const std::vector<Line>& lines) {
    using namespace detail;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& l : lines) {
        for (double v : l.x) xlo = std::min(xlo, v), xhi = std::max(xhi, v);
        for (double v : l.y)
            if (std::isfinite(v)) ylo = std::min(ylo, v), yhi = std::max(yhi, v);
    }
    const Range xr = pad(xlo, xhi), yr = pad(ylo, yhi);
    frame(out, title, "lagdeconv.plot");
    ticks(out, xr, yr);
    double legend_y = kT + 15;
    for (const auto& l : lines) {
        out << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
            if (!std::isfinite(l.y[i])) continue;
            out << xr.map(l.x[i], kL, kW - kR) << ',' << yr.map(l.y[i], kH - kB, kT) << ' ';
        }
        out << "\"/>\n";
        if (l.markers) {
            for (std::size_t i = 0; i < l.x.size() && i < l.y.size(); ++i) {
                if (!std::isfinite(l.y[i])) continue;
                out << "<circle r=\"2\" fill=\"" << l.color << "\" cx=\"" << xr.map(l.x[i], kL, kW - kR)
                    << "\" cy=\"" << yr.map(l.y[i], kH - kB, kT) << "\"/>\n";
            }
        }
        out << "<text x=\"" << kW - kR - 110 << "\" y=\"" << legend_y << "\" fill=\"" << l.color << "\">"
            << esc(l.label) << "</text>\n";
        legend_y += 14;
    }
    out << "</svg>\n";
}

/// Box plots (quartile box, median bar, min-max whiskers) of several samples.
inline void box_plot(std::ostream& out, const std::string& title, const std::vector<std::string>& labels,
                     const std::vector<std::vector<double>>& samples) {
    using namespace detail;
    std::vector<stats::FiveNumber> fn;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : samples) {
        std::vector<double> finite;
        for (double v : s)
            if (std::isfinite(v)) finite.push_back(v);
        if (finite.empty()) finite.push_back(0.0);
        fn.push_back(stats::five_number(finite));
        lo = std::min(lo, fn.back().min);
        hi = std::max(hi, fn.back().max);
    }
    const Range yr = pad(lo, hi);
    frame(out, title, "lagdeconv.boxplot");
    const Range xr{0.0, static_cast<double>(samples.size())};
    ticks(out, xr, yr, false);
    for (std::size_t i = 0; i < fn.size(); ++i) {
        const double cx = xr.map(i + 0.5, kL, kW - kR);
        const double hw = 0.25 * (kW - kL - kR) / std::max<double>(1.0, static_cast<double>(samples.size()));
        auto Y = [&](double v) { return yr.map(v, kH - kB, kT); };
        out << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << Y(fn[i].min) << "\" y2=\"" << Y(fn[i].max)
            << "\" stroke=\"#333\"/>\n";
        out << "<rect x=\"" << cx - hw << "\" y=\"" << Y(fn[i].q75) << "\" width=\"" << 2 * hw << "\" height=\""
            << std::max(0.5, Y(fn[i].q25) - Y(fn[i].q75)) << "\" fill=\"#9ecae1\" stroke=\"#333\"/>\n";
        out << "<line x1=\"" << cx - hw << "\" x2=\"" << cx + hw << "\" y1=\"" << Y(fn[i].median) << "\" y2=\""
            << Y(fn[i].median) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << cx << "\" y=\"" << kH - kB + 30 << "\" text-anchor=\"middle\">"
            << esc(i < labels.size() ? labels[i] : std::string()) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace lagdeconv::svg
