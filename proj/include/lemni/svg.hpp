#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>

#include "lemni/error.hpp"
#include "lemni/geometry.hpp"

namespace lemni {

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

/// Standalone SVG: one closed path per component, a dot per root and the unit
/// circle, in a view fitted to the bounding radius. Stroke widths scale with
/// the view so pictures at different degrees look alike.
inline std::string render_svg(const LevelSetCurve& curve, std::span<const Complex> roots) {
    using detail::svg_num;
    const double half = 1.05 * std::max(1.0, curve.bounding_radius);
    const double stroke = half / 300.0;
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"" + svg_num(-half) + " " +
         svg_num(-half) + " " + svg_num(2.0 * half) + " " + svg_num(2.0 * half) + "\">\n";
    s += "<rect x=\"" + svg_num(-half) + "\" y=\"" + svg_num(-half) + "\" width=\"" + svg_num(2.0 * half) +
         "\" height=\"" + svg_num(2.0 * half) + "\" fill=\"white\"/>\n";
    s += "<g transform=\"scale(1,-1)\">\n";
    s += "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"" +
         svg_num(4.0 * stroke) + "\" stroke-width=\"" + svg_num(stroke) + "\"/>\n";
    for (const auto& loop : curve.components) {
        s += "<path fill=\"#cfe3f7\" stroke=\"#1f4e8c\" stroke-width=\"" + svg_num(stroke) + "\" d=\"";
        for (std::size_t i = 0; i < loop.size(); ++i) {
            s += (i == 0 ? "M" : " L") + svg_num(loop[i].real()) + " " + svg_num(loop[i].imag());
        }
        s += " Z\"/>\n";
    }
    for (const auto& z : roots) {
        s += "<circle cx=\"" + svg_num(z.real()) + "\" cy=\"" + svg_num(z.imag()) + "\" r=\"" +
             svg_num(1.5 * stroke) + "\" fill=\"#c0392b\"/>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

inline void emit_svg(const LevelSetCurve& curve, std::span<const Complex> roots, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << render_svg(curve, roots);
    if (!out) throw Error("write failed for " + path);
}

}  // namespace lemni
