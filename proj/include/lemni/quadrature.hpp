#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "lemni/error.hpp"

namespace lemni {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights live on the odd Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 8> kGaussWeights = {
    0.0, 0.129484966168869693270611432679082, 0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975, 0.0, 0.417959183673469387755102040816327};

struct Rule15 {
    std::array<double, 15> nodes{};
    std::array<double, 15> kronrod{};
    std::array<double, 15> gauss{};
};

inline const Rule15& rule15() {
    static const Rule15 rule = [] {
        Rule15 r;
        for (int i = 0; i < 7; ++i) {
            r.nodes[static_cast<std::size_t>(i)] = -kKronrodNodes[static_cast<std::size_t>(i)];
            r.nodes[static_cast<std::size_t>(14 - i)] = kKronrodNodes[static_cast<std::size_t>(i)];
            r.kronrod[static_cast<std::size_t>(i)] = r.kronrod[static_cast<std::size_t>(14 - i)] =
                kKronrodWeights[static_cast<std::size_t>(i)];
            r.gauss[static_cast<std::size_t>(i)] = r.gauss[static_cast<std::size_t>(14 - i)] =
                kGaussWeights[static_cast<std::size_t>(i)];
        }
        r.nodes[7] = 0.0;
        r.kronrod[7] = kKronrodWeights[7];
        r.gauss[7] = kGaussWeights[7];
        return r;
    }();
    return rule;
}

struct Panel {
    double x0, x1, y0, y1;
    int level_x, level_y;
    std::uint64_t id;
    double value, error, error_x, error_y;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;
    }
};

template <class RowFn>
Panel evaluate_panel(RowFn& row, double x0, double x1, double y0, double y1, int lx, int ly, std::uint64_t id) {
    const auto& r = rule15();
    const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x1 + x0);
    const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y1 + y0);
    std::array<double, 15> ys{};
    for (std::size_t j = 0; j < 15; ++j) ys[j] = cy + hy * r.nodes[j];
    std::array<double, 15> vals{};
    double kk = 0.0, gk = 0.0, kg = 0.0, gg = 0.0;
    for (std::size_t i = 0; i < 15; ++i) {
        row(cx + hx * r.nodes[i], std::span<const double>(ys), std::span<double>(vals));
        double row_k = 0.0, row_g = 0.0;
        for (std::size_t j = 0; j < 15; ++j) {
            row_k += r.kronrod[j] * vals[j];
            row_g += r.gauss[j] * vals[j];
        }
        kk += r.kronrod[i] * row_k;
        kg += r.kronrod[i] * row_g;
        gk += r.gauss[i] * row_k;
        gg += r.gauss[i] * row_g;
    }
    const double area = hx * hy;
    Panel p{x0, x1, y0, y1, lx, ly, id, area * kk, 0.0, 0.0, 0.0};
    p.error_x = std::fabs(area * (kk - gk));
    p.error_y = std::fabs(area * (kk - kg));
    p.error = std::max(std::fabs(area * (kk - gg)), p.error_x + p.error_y);
    return p;
}

}  // namespace detail

/// Adaptive tensor Gauss-Kronrod (7/15) cubature over a union of rectangles.
///
/// `row(x, ys, out)` fills out[j] = f(x, ys[j]); this lets expensive
/// x-dependent work be shared across a row of nodes. The initial panels are
/// the cells of the breakpoint grid. The worst panel is split (along the
/// dimension whose embedded estimate dominates) until the summed error falls
/// under `abs_tolerance`, every panel hits `max_depth` halvings, or
/// `max_panels` is reached. Panels are summed in creation order, so the result
/// does not depend on heap tie-breaking.
template <class RowFn>
QuadratureResult integrate_2d(RowFn&& row, std::span<const double> x_breaks, std::span<const double> y_breaks,
                              double abs_tolerance, int max_depth, int max_panels = 400000) {
    if (x_breaks.size() < 2 || y_breaks.size() < 2) throw InvalidArgument("need at least one panel per axis");
    if (!(abs_tolerance > 0.0)) throw InvalidArgument("abs_tolerance must be positive");
    std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> open;
    std::vector<detail::Panel> finished;
    std::uint64_t next_id = 0;
    double total_error = 0.0;
    int live = 0;
    for (std::size_t i = 0; i + 1 < x_breaks.size(); ++i) {
        for (std::size_t j = 0; j + 1 < y_breaks.size(); ++j) {
            auto p = detail::evaluate_panel(row, x_breaks[i], x_breaks[i + 1], y_breaks[j], y_breaks[j + 1], 0, 0,
                                            next_id++);
            total_error += p.error;
            open.push(p);
            ++live;
        }
    }
    while (!open.empty() && total_error > abs_tolerance && live < max_panels) {
        const detail::Panel worst = open.top();
        open.pop();
        const bool can_x = worst.level_x < max_depth;
        const bool can_y = worst.level_y < max_depth;
        if (!can_x && !can_y) {
            finished.push_back(worst);
            continue;
        }
        bool split_x = can_x && worst.error_x * 2.0 >= worst.error_y;
        bool split_y = can_y && worst.error_y * 2.0 >= worst.error_x;
        if (!split_x && !split_y) (can_x ? split_x : split_y) = true;
        total_error -= worst.error;
        const double xm = 0.5 * (worst.x0 + worst.x1);
        const double ym = 0.5 * (worst.y0 + worst.y1);
        std::vector<std::array<double, 4>> boxes;
        if (split_x && split_y) {
            boxes = {{worst.x0, xm, worst.y0, ym}, {xm, worst.x1, worst.y0, ym},
                     {worst.x0, xm, ym, worst.y1}, {xm, worst.x1, ym, worst.y1}};
        } else if (split_x) {
            boxes = {{worst.x0, xm, worst.y0, worst.y1}, {xm, worst.x1, worst.y0, worst.y1}};
        } else {
            boxes = {{worst.x0, worst.x1, worst.y0, ym}, {worst.x0, worst.x1, ym, worst.y1}};
        }
        live += static_cast<int>(boxes.size()) - 1;
        for (const auto& b : boxes) {
            auto child = detail::evaluate_panel(row, b[0], b[1], b[2], b[3], worst.level_x + (split_x ? 1 : 0),
                                                worst.level_y + (split_y ? 1 : 0), next_id++);
            total_error += child.error;
            open.push(child);
        }
    }
    while (!open.empty()) {
        finished.push_back(open.top());
        open.pop();
    }
    std::sort(finished.begin(), finished.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    QuadratureResult out;
    for (const auto& p : finished) {
        out.value += p.value;
        out.error += p.error;
    }
    out.panels = static_cast<int>(finished.size());
    out.converged = out.error <= abs_tolerance;
    return out;
}

/// One-dimensional adaptive Gauss-Kronrod, same splitting policy.
template <class Fn>
QuadratureResult integrate_1d(Fn&& f, std::span<const double> breaks, double abs_tolerance, int max_depth) {
    const std::array<double, 2> unit = {0.0, 1.0};
    auto row = [&f](double x, std::span<const double> ys, std::span<double> out) {
        const double v = f(x);
        for (std::size_t j = 0; j < ys.size(); ++j) out[j] = v;
    };
    return integrate_2d(row, breaks, std::span<const double>(unit), abs_tolerance, max_depth);
}

}  // namespace lemni
