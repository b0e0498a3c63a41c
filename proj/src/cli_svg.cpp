#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "liepnm/cli.hpp"

namespace liepnm::cli {

namespace {

struct Frame {
    double x_lo, x_hi, y_lo, y_hi;
    double left, right, top, bottom;

    double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * (right - left); }
    double py(double y) const { return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top); }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string path_data(const Frame& f, const Curve& c) {
    std::ostringstream d;
    d.precision(7);
    bool pen_down = false;
    for (std::size_t i = 0; i < std::min(c.x.size(), c.y.size()); ++i) {
        if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) {
            pen_down = false;
            continue;
        }
        d << (pen_down ? " L" : (i ? " M" : "M")) << f.px(c.x[i]) << "," << f.py(c.y[i]);
        pen_down = true;
    }
    return d.str();
}

}  // namespace

std::string render_svg(const Plot& plot, int width, int height) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
    auto extend = [&](const Curve& c) {
        for (std::size_t i = 0; i < std::min(c.x.size(), c.y.size()); ++i) {
            if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
            x_lo = std::min(x_lo, c.x[i]);
            x_hi = std::max(x_hi, c.x[i]);
            y_lo = std::min(y_lo, c.y[i]);
            y_hi = std::max(y_hi, c.y[i]);
        }
    };
    for (const auto& c : plot.samples) extend(c);
    for (const auto& c : plot.envelope) extend(c);
    if (plot.reference) extend(*plot.reference);
    if (!(x_hi > x_lo)) {
        x_lo = std::isfinite(x_lo) ? x_lo - 1.0 : 0.0;
        x_hi = x_lo + 2.0;
    }
    if (!(y_hi > y_lo)) {
        y_lo = std::isfinite(y_lo) ? y_lo - 1.0 : 0.0;
        y_hi = y_lo + 2.0;
    }
    const double pad_y = 0.05 * (y_hi - y_lo);
    const Frame f{x_lo, x_hi, y_lo - pad_y, y_hi + pad_y, 60.0, width - 20.0, 20.0, height - 50.0};

    std::ostringstream s;
    s << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
      << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" viewBox="0 0 )" << width << ' ' << height << R"(">)" << '\n'
      << R"(<rect x="0" y="0" width=")" << width << R"(" height=")" << height << R"(" fill="white"/>)" << '\n';

    // Axes with five ticks each.
    s << R"(<g stroke="#444" stroke-width="1" fill="none">)" << '\n'
      << R"(<line x1=")" << f.left << R"(" y1=")" << f.bottom << R"(" x2=")" << f.right << R"(" y2=")" << f.bottom
      << R"("/>)" << '\n'
      << R"(<line x1=")" << f.left << R"(" y1=")" << f.top << R"(" x2=")" << f.left << R"(" y2=")" << f.bottom
      << R"("/>)" << '\n'
      << "</g>\n";
    s << R"(<g font-family="sans-serif" font-size="11" fill="#222">)" << '\n';
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x_lo + (f.x_hi - f.x_lo) * k / 4.0;
        const double yv = f.y_lo + (f.y_hi - f.y_lo) * k / 4.0;
        s << R"(<text x=")" << f.px(xv) << R"(" y=")" << f.bottom + 16 << R"(" text-anchor="middle">)" << fmt(xv)
          << "</text>\n";
        s << R"(<text x=")" << f.left - 6 << R"(" y=")" << f.py(yv) + 4 << R"(" text-anchor="end">)" << fmt(yv)
          << "</text>\n";
    }
    s << R"(<text x=")" << (f.left + f.right) / 2 << R"(" y=")" << height - 12 << R"(" text-anchor="middle">)"
      << escape(plot.x_label) << "</text>\n";
    const double mid = (f.top + f.bottom) / 2;
    s << "<text x=\"14\" y=\"" << mid << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << mid << ")\">"
      << escape(plot.y_label) << "</text>\n";
    s << "</g>\n";

    s << R"(<g stroke="black" stroke-width="0.6" stroke-opacity="0.35" fill="none">)" << '\n';
    for (const auto& c : plot.samples) s << R"(<path d=")" << path_data(f, c) << R"("/>)" << '\n';
    s << "</g>\n";
    for (const auto& c : plot.envelope)
        s << R"(<path stroke="blue" stroke-width="1.2" fill="none" d=")" << path_data(f, c) << R"("/>)" << '\n';
    if (plot.reference)
        s << R"(<path stroke="red" stroke-width="1.5" fill="none" d=")" << path_data(f, *plot.reference) << R"("/>)"
          << '\n';
    s << "</svg>\n";
    return s.str();
}

}  // namespace liepnm::cli
