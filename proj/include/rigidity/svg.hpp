#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/framework.hpp"

namespace rigidity {

struct RenderOptions {
    double scale = 100.0;   // pixels per coordinate unit
    double margin = 30.0;   // canvas padding in pixels
    bool flex_arrows = false;
};

namespace detail {

inline std::string svg_num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", x + 0.0);  // normalize -0
    return buf;
}

// Singleton polyhedral edges are colored by the {f,-f} class of their active
// functional (first class red, second blue, then a fixed palette); edges with
// several active functionals are black; smooth edges dark gray.
inline const char* edge_color(const NormSpec& norm, const EdgeGeometry<double>& g) {
    static const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    if (g.cls == EdgeGeometry<double>::Class::Smooth) return "#333333";
    if (g.active_rows.size() != 1) return "#000000";
    const int cls = norm.functional_class[g.active_functional[0]];
    // map the class value (an index of the pair representative) to a palette
    // slot by its order among the representatives
    int slot = 0;
    for (int i = 0; i < cls; ++i)
        if (norm.functional_class[i] == i) ++slot;
    return palette[slot % 8];
}

}  // namespace detail

// Deterministic SVG 1.1 drawing: same framework, witness, and options give
// byte-identical output.
inline std::string render_svg(const Framework<double>& fw,
                              const std::optional<std::vector<double>>& flex_witness,
                              const RenderOptions& opt = {}) {
    using detail::svg_num;
    const int n = fw.vertex_count();
    const int d = fw.dim();

    double umax = 0.0;
    std::vector<double> arrow(2 * n, 0.0);
    if (opt.flex_arrows && flex_witness && d >= 2) {
        for (int v = 0; v < n; ++v) {
            arrow[2 * v] = (*flex_witness)[v * d];
            arrow[2 * v + 1] = (*flex_witness)[v * d + 1];
            umax = std::max(umax, std::hypot(arrow[2 * v], arrow[2 * v + 1]));
        }
    }
    const double arrow_len = 0.45 * opt.scale;

    double minx = 0, maxx = 0, miny = 0, maxy = 0;
    bool first = true;
    const auto grow = [&](double x, double y) {
        if (first) {
            minx = maxx = x;
            miny = maxy = y;
            first = false;
        } else {
            minx = std::min(minx, x);
            maxx = std::max(maxx, x);
            miny = std::min(miny, y);
            maxy = std::max(maxy, y);
        }
    };
    for (int v = 0; v < n; ++v) {
        const double x = d >= 1 ? fw.placement[v][0] : 0.0;
        const double y = d >= 2 ? fw.placement[v][1] : 0.0;
        grow(x, y);
        if (umax > 0)
            grow(x + arrow[2 * v] / umax * arrow_len / opt.scale,
                 y + arrow[2 * v + 1] / umax * arrow_len / opt.scale);
    }
    if (first) grow(0, 0);

    const double width = (maxx - minx) * opt.scale + 2 * opt.margin;
    const double height = (maxy - miny) * opt.scale + 2 * opt.margin;
    const auto sx = [&](double x) { return (x - minx) * opt.scale + opt.margin; };
    const auto sy = [&](double y) { return (maxy - y) * opt.scale + opt.margin; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + svg_num(width) +
           "\" height=\"" + svg_num(height) + "\" viewBox=\"0 0 " + svg_num(width) + " " +
           svg_num(height) + "\">\n";

    for (int e = 0; e < fw.edge_count(); ++e) {
        const auto& g = fw.edge_geometry[e];
        if (g.cls == EdgeGeometry<double>::Class::ZeroLength) continue;
        const auto [a, b] = fw.graph.edges[e];
        out += "  <line x1=\"" + svg_num(sx(fw.placement[a][0])) + "\" y1=\"" +
               svg_num(sy(fw.placement[a][1])) + "\" x2=\"" + svg_num(sx(fw.placement[b][0])) +
               "\" y2=\"" + svg_num(sy(fw.placement[b][1])) + "\" stroke=\"" +
               detail::edge_color(fw.norm, g) + "\" stroke-width=\"" +
               (g.badly_positioned() ? "3" : "2") + "\"/>\n";
    }

    for (int v = 0; v < n; ++v) {
        out += "  <circle cx=\"" + svg_num(sx(fw.placement[v][0])) + "\" cy=\"" +
               svg_num(sy(fw.placement[v][1])) + "\" r=\"4\" fill=\"#111111\"/>\n";
    }

    if (umax > 0) {
        for (int v = 0; v < n; ++v) {
            const double mag = std::hypot(arrow[2 * v], arrow[2 * v + 1]);
            if (mag < 0.08 * umax) continue;
            const double x0 = sx(fw.placement[v][0]);
            const double y0 = sy(fw.placement[v][1]);
            const double dx = arrow[2 * v] / umax * arrow_len;
            const double dy = -arrow[2 * v + 1] / umax * arrow_len;  // svg y is down
            const double x1 = x0 + dx;
            const double y1 = y0 + dy;
            const double ang = std::atan2(dy, dx);
            const double head = 6.0;
            const double hx1 = x1 - head * std::cos(ang - 0.5);
            const double hy1 = y1 - head * std::sin(ang - 0.5);
            const double hx2 = x1 - head * std::cos(ang + 0.5);
            const double hy2 = y1 - head * std::sin(ang + 0.5);
            out += "  <path d=\"M " + svg_num(x0) + " " + svg_num(y0) + " L " + svg_num(x1) + " " +
                   svg_num(y1) + " M " + svg_num(hx1) + " " + svg_num(hy1) + " L " + svg_num(x1) +
                   " " + svg_num(y1) + " L " + svg_num(hx2) + " " + svg_num(hy2) +
                   "\" stroke=\"#d62728\" stroke-width=\"2\" fill=\"none\"/>\n";
        }
    }

    out += "</svg>\n";
    return out;
}

}  // namespace rigidity
