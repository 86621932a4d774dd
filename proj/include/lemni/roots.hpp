#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "lemni/error.hpp"
#include "lemni/polynomial.hpp"

namespace lemni {

struct RootReport {
    std::vector<Complex> roots;
    std::vector<double> log_residuals;  // log |p(root)|
    int iterations = 0;
    bool converged = false;
};

/// Aberth-Ehrlich did not reach the residual bound; carries the best iterate.
class RootFindingError : public NumericError {
public:
    RootFindingError(const std::string& what, RootReport best) : NumericError(what), best_(std::move(best)) {}
    const RootReport& best() const { return best_; }

private:
    RootReport best_;
};

namespace detail {

/// Starting points on circles whose radii come from the upper convex hull of
/// (k, log|c_k|) (the Newton polygon), so clusters of very different moduli
/// each get their own ring.
inline std::vector<Complex> newton_polygon_guesses(std::span<const Complex> c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<int> idx;
    std::vector<double> lv;
    for (int k = 0; k <= n; ++k) {
        const double a = std::abs(c[static_cast<std::size_t>(k)]);
        if (a > 0.0) {
            idx.push_back(k);
            lv.push_back(std::log(a));
        }
    }
    std::vector<int> hull;  // indices into idx
    for (std::size_t m = 0; m < idx.size(); ++m) {
        while (hull.size() >= 2) {
            const auto a = static_cast<std::size_t>(hull[hull.size() - 2]);
            const auto b = static_cast<std::size_t>(hull.back());
            const double cross = (idx[b] - idx[a]) * (lv[m] - lv[a]) - (lv[b] - lv[a]) * (idx[m] - idx[a]);
            if (cross >= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(static_cast<int>(m));
    }
    std::vector<Complex> guesses;
    guesses.reserve(static_cast<std::size_t>(n));
    constexpr double kOffset = 0.7;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const auto a = static_cast<std::size_t>(hull[h]);
        const auto b = static_cast<std::size_t>(hull[h + 1]);
        const int count = idx[b] - idx[a];
        const double radius = std::exp((lv[a] - lv[b]) / count);
        for (int j = 0; j < count; ++j) {
            const double angle = 2.0 * std::numbers::pi * j / count + 2.0 * std::numbers::pi * h / n + kOffset;
            guesses.push_back(std::polar(radius, angle));
        }
    }
    return guesses;
}

/// log of the allowed residual: 1e-8 * max|c_k| * max(1, |z|)^n.
inline double log_residual_bound(const ComplexPolynomial& p, Complex z) {
    double cmax = 0.0;
    for (const auto& c : p.coefficients()) cmax = std::max(cmax, std::abs(c));
    return std::log(1e-8) + std::log(cmax) + p.degree() * std::max(0.0, std::log(std::abs(z)));
}

}  // namespace detail

/// All roots by simultaneous Aberth-Ehrlich iteration (Gauss-Seidel updates).
/// Exact zeros at the origin (c_0 = c_1 = ... = 0) are split off first.
inline RootReport find_roots(const ComplexPolynomial& p, int max_iterations = 500) {
    const int n = p.degree();
    if (p.leading() == Complex{0.0, 0.0}) throw DegeneratePolynomial("leading coefficient is zero");
    const auto coeffs = p.coefficients();
    int zeros = 0;
    while (coeffs[static_cast<std::size_t>(zeros)] == Complex{0.0, 0.0}) ++zeros;

    RootReport report;
    report.roots.assign(static_cast<std::size_t>(zeros), Complex{0.0, 0.0});
    const ComplexPolynomial reduced(std::vector<Complex>(coeffs.begin() + zeros, coeffs.end()));
    const int m = reduced.degree();
    std::vector<Complex> z = m > 0 ? detail::newton_polygon_guesses(reduced.coefficients()) : std::vector<Complex>{};
    std::vector<char> done(z.size(), 0);
    constexpr double kEps = std::numeric_limits<double>::epsilon();

    int iter = 0;
    int remaining = m;
    for (; iter < max_iterations && remaining > 0; ++iter) {
        for (int i = 0; i < m; ++i) {
            if (done[static_cast<std::size_t>(i)]) continue;
            const Complex zi = z[static_cast<std::size_t>(i)];
            const auto jet = reduced.jet(zi);
            if (jet.value == Complex{0.0, 0.0}) {
                done[static_cast<std::size_t>(i)] = 1;
                --remaining;
                continue;
            }
            const Complex newton = jet.value / jet.first;
            Complex repulsion{0.0, 0.0};
            for (int j = 0; j < m; ++j) {
                if (j != i) repulsion += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
            }
            const Complex step = newton / (1.0 - newton * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
            z[static_cast<std::size_t>(i)] = zi - step;
            if (std::abs(step) <= 4.0 * kEps * std::abs(zi)) {
                done[static_cast<std::size_t>(i)] = 1;
                --remaining;
            }
        }
    }
    report.iterations = iter;
    // two Newton polishing steps per root
    for (auto& zi : z) {
        for (int k = 0; k < 2; ++k) {
            const auto jet = reduced.jet(zi);
            if (jet.value == Complex{0.0, 0.0} || jet.first == Complex{0.0, 0.0}) break;
            const Complex step = jet.value / jet.first;
            const Complex next = zi - step;
            if (!(p.log_abs(next) < p.log_abs(zi))) break;
            zi = next;
        }
    }
    report.roots.insert(report.roots.end(), z.begin(), z.end());
    report.converged = true;
    report.log_residuals.reserve(report.roots.size());
    for (const auto& r : report.roots) {
        const double lr = r == Complex{0.0, 0.0} && coeffs[0] == Complex{0.0, 0.0}
                              ? -std::numeric_limits<double>::infinity()
                              : p.log_abs(r);
        report.log_residuals.push_back(lr);
        if (!(lr <= detail::log_residual_bound(p, r))) report.converged = false;
    }
    (void)n;
    return report;
}

/// Roots with residual |p(root)| <= 1e-8 max|c_k| max(1,|root|)^n, or throws.
inline std::vector<Complex> roots(const ComplexPolynomial& p, int max_iterations = 500) {
    auto report = find_roots(p, max_iterations);
    if (!report.converged) throw RootFindingError("root iteration did not converge", std::move(report));
    return std::move(report.roots);
}

}  // namespace lemni
