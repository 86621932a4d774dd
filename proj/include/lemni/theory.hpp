#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "lemni/ensembles.hpp"
#include "lemni/quadrature.hpp"
#include "lemni/special.hpp"

namespace lemni {

struct QuadratureConfig {
    double abs_tolerance = 1e-7;
    int max_depth = 30;
    /// Empty: integrate over the whole plane (the exterior of a split radius is
    /// compactified by r = R/u). Set: truncate at this radius and add a bound on
    /// the discarded tail to the reported error.
    std::optional<double> fixed_cutoff;

    void validate() const {
        if (!(abs_tolerance > 0.0)) throw InvalidArgument("abs_tolerance must be positive");
        if (max_depth < 4) throw InvalidArgument("max_depth must be at least 4");
        if (fixed_cutoff && !(*fixed_cutoff > 0.0)) throw InvalidArgument("cutoff radius must be positive");
    }
};

struct LengthEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    int cells_used = 0;
    bool converged = true;
};

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Integrand of the expected-length formula from log kernel entries.
/// `abs_cos` is |Re b| / |b|, which equals |cos(arg z)| for k = 1.
inline double length_density(const LogKernelEntries& l, double abs_cos) {
    const double log_re_b = abs_cos > 0.0 ? l.log_b + std::log(abs_cos) : kNegInf;
    const double log_pref = -std::exp(-l.log_a) - l.log_a;
    const double drift = log_re_b == kNegInf ? 0.0 : kSqrtPi * std::exp(log_pref + log_re_b - l.log_a);
    if (l.log_det == kNegInf) {
        // |Sigma| = 0: only the erf term survives, with erf -> 1.
        return drift;
    }
    const double q = log_re_b == kNegInf ? 0.0 : std::exp(2.0 * log_re_b - l.log_a - l.log_det);
    const double spread = std::exp(log_pref + 0.5 * (l.log_det - l.log_a) - q);
    const double erf_arg = log_re_b == kNegInf ? 0.0 : std::exp(log_re_b - 0.5 * (l.log_a + l.log_det));
    return spread + drift * lemni::erf(erf_arg);
}

/// Upper bound of the density over the circle |z| = r, as a function of r only.
inline double radial_density_bound(const LogKernelEntries& l) {
    const double g = std::exp(-std::exp(-l.log_a));
    double v = std::exp(0.5 * l.log_det - 1.5 * l.log_a);
    if (l.log_b != kNegInf) v += kSqrtPi * std::exp(l.log_b - 2.0 * l.log_a);
    return g * v;
}

inline std::vector<double> radial_breaks(const EnsembleSpec& spec, double split) {
    const double n = static_cast<double>(spec.degree);
    std::vector<double> b = {0.0, split, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
    for (double j : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        b.push_back(1.0 - j / n);
        b.push_back(1.0 + j / n);
    }
    for (double j : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) b.push_back(j / std::sqrt(n));
    if (spec.kind == EnsembleKind::Weyl) {
        for (double j : {-2.0, -1.0, 0.0, 1.0, 2.0}) b.push_back(std::sqrt(n) + j);
    }
    std::erase_if(b, [split](double x) { return x < 0.0 || x > split; });
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return std::fabs(x - y) < 1e-12; }), b.end());
    return b;
}

inline double default_split_radius(const EnsembleSpec& spec) {
    if (spec.kind == EnsembleKind::Weyl) return 2.0 + std::sqrt(static_cast<double>(spec.degree)) + 3.0;
    return 2.0;
}

}  // namespace detail

/// The expected-length integrand F(z) for order-1 kernel entries, excluding the
/// global sqrt(pi) and the area element.
class LengthIntegrand {
public:
    explicit LengthIntegrand(const EnsembleSpec& spec) : series_(spec, 1) {}

    double operator()(Complex z) const {
        const double r = std::abs(z);
        const double abs_cos = r > 0.0 ? std::fabs(z.real()) / r : 0.0;
        return detail::length_density(series_.log_entries(r), abs_cos);
    }

    /// Values at fixed radius r for several angles; the kernel is evaluated once.
    void at_radius(double r, std::span<const double> thetas, std::span<double> out) const {
        const auto l = series_.log_entries(r);
        for (std::size_t j = 0; j < thetas.size(); ++j) out[j] = detail::length_density(l, std::fabs(std::cos(thetas[j])));
    }

    double radial_bound(double r) const { return detail::radial_density_bound(series_.log_entries(r)); }

    const KernelSeries& series() const { return series_; }

private:
    KernelSeries series_;
};

inline double length_integrand(const EnsembleSpec& spec, Complex z) { return LengthIntegrand(spec)(z); }

/// E|Lambda| = sqrt(pi) * integral of F over the plane, in polar coordinates
/// with the four-fold symmetry F(x, y) = F(|x|, |y|) folded out.
inline LengthEstimate expected_length(const EnsembleSpec& spec, const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const LengthIntegrand integrand(spec);
    const double scale = 4.0 * detail::kSqrtPi;
    const double split = cfg.fixed_cutoff.value_or(detail::default_split_radius(spec));

    auto radial_map = [split](double x, double& jac) {
        if (x <= split) {
            jac = 1.0;
            return x;
        }
        const double u = split + 1.0 - x;  // u in (0, 1]
        jac = split / (u * u);
        return split / u;
    };

    auto row = [&](double x, std::span<const double> thetas, std::span<double> out) {
        double jac = 0.0;
        const double r = radial_map(x, jac);
        integrand.at_radius(r, thetas, out);
        for (auto& v : out) v *= r * jac;
    };

    auto breaks = detail::radial_breaks(spec, split);
    double tail = 0.0;
    if (!cfg.fixed_cutoff) {
        for (double e : {0.25, 0.5, 0.75, 1.0}) breaks.push_back(split + e);
    }
    const std::array<double, 3> theta_breaks = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
    const double quad_tol = (cfg.fixed_cutoff ? 0.5 : 1.0) * cfg.abs_tolerance / scale;
    const auto q = integrate_2d(row, breaks, theta_breaks, quad_tol, cfg.max_depth);

    if (cfg.fixed_cutoff) {
        // 2 pi r * bound(r) integrated over [R, inf) through r = R / u.
        auto tail_fn = [&](double u) {
            if (u <= 0.0) return 0.0;
            const double r = split / u;
            return 2.0 * std::numbers::pi * r * integrand.radial_bound(r) * split / (u * u);
        };
        const std::array<double, 5> ub = {0.0, 0.25, 0.5, 0.75, 1.0};
        const auto t = integrate_1d(tail_fn, ub, 1e-3 * cfg.abs_tolerance, cfg.max_depth);
        tail = detail::kSqrtPi * (t.value + t.error);
    }
    LengthEstimate out;
    out.value = scale * q.value;
    out.error_bound = scale * q.error + tail;
    out.cells_used = q.panels;
    out.converged = out.error_bound <= cfg.abs_tolerance;
    return out;
}

/// Expected length of the part of the lemniscate inside |z| < radius.
inline LengthEstimate expected_length_in_disk(const EnsembleSpec& spec, double radius,
                                              const QuadratureConfig& cfg = {}) {
    cfg.validate();
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("radius must be positive and finite");
    const LengthIntegrand integrand(spec);
    const double scale = 4.0 * detail::kSqrtPi;
    auto row = [&](double r, std::span<const double> thetas, std::span<double> out) {
        integrand.at_radius(r, thetas, out);
        for (auto& v : out) v *= r;
    };
    auto breaks = detail::radial_breaks(spec, std::max(radius, detail::default_split_radius(spec)));
    std::erase_if(breaks, [radius](double x) { return x >= radius; });
    breaks.push_back(radius);
    const std::array<double, 3> theta_breaks = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
    const auto q = integrate_2d(row, breaks, theta_breaks, cfg.abs_tolerance / scale, cfg.max_depth);
    LengthEstimate out;
    out.value = scale * q.value;
    out.error_bound = scale * q.error;
    out.cells_used = q.panels;
    out.converged = out.error_bound <= cfg.abs_tolerance;
    return out;
}

/// Pointwise n -> infinity limit of the Kac integrand (zero outside the disk).
inline double kac_limit_integrand(Complex z) {
    const double t = std::norm(z);
    if (t >= 1.0) return 0.0;
    const double w = 1.0 - t;
    const double x = std::fabs(z.real());
    return std::exp(-w) * (std::exp(-x * x * w) / std::sqrt(w) + detail::kSqrtPi * x * lemni::erf(x * std::sqrt(w)));
}

/// Limit of E|Lambda_n| for the Kac ensemble. The edge singularity
/// (1 - |z|^2)^(-1/2) is removed by v = sqrt(1 - r^2), i.e. u = 1 - r^2 = v^2.
inline LengthEstimate kac_limit_constant(const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const double scale = 4.0 * detail::kSqrtPi;
    auto row = [](double v, std::span<const double> thetas, std::span<double> out) {
        const double rr = std::sqrt(std::max(0.0, 1.0 - v * v));
        const double w = v * v;
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            const double x = rr * std::fabs(std::cos(thetas[j]));
            out[j] = std::exp(-w) * (std::exp(-x * x * w) + detail::kSqrtPi * x * lemni::erf(x * v) * v);
        }
    };
    const std::array<double, 5> vb = {0.0, 0.25, 0.5, 0.75, 1.0};
    const std::array<double, 3> tb = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
    const auto q = integrate_2d(row, vb, tb, cfg.abs_tolerance / scale, cfg.max_depth);
    return {scale * q.value, scale * q.error, q.panels, scale * q.error <= cfg.abs_tolerance};
}

/// Integrand of the Kostlan limit in (t, theta), r = sqrt(t/n), including the
/// 1/2 from r dr = dt / (2n). Even in cos(theta).
inline double kostlan_limit_integrand(double t, double theta) {
    const double c = std::cos(theta);
    const double et = std::exp(-t);
    const double st = std::sqrt(t);
    return 0.5 * std::exp(-et) *
           (std::exp(-0.5 * t) * std::exp(-t * c * c * et) +
            detail::kSqrtPi * st * c * et * lemni::erf(st * c * std::exp(-0.5 * t)));
}

/// Limit of sqrt(n) E|Lambda_n| for the Kostlan ensemble.
inline LengthEstimate kostlan_limit_constant(const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const double scale = 4.0 * detail::kSqrtPi;
    constexpr double kCut = 90.0;
    auto row = [](double t, std::span<const double> thetas, std::span<double> out) {
        for (std::size_t j = 0; j < thetas.size(); ++j) out[j] = kostlan_limit_integrand(t, thetas[j]);
    };
    const std::array<double, 10> tb = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, kCut};
    const std::array<double, 3> thb = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
    const auto q = integrate_2d(row, tb, thb, 0.5 * cfg.abs_tolerance / scale, cfg.max_depth);
    // integrand <= (e^{-t/2} + sqrt(pi t) e^{-t}) / 2 beyond the cut
    const double tail = detail::kSqrtPi * std::numbers::pi *
                        (2.0 * std::exp(-0.5 * kCut) +
                         detail::kSqrtPi * (std::sqrt(kCut) + 0.5 / std::sqrt(kCut)) * std::exp(-kCut));
    const double err = scale * q.error + tail;
    return {scale * q.value, err, q.panels, err <= cfg.abs_tolerance};
}

/// Pointwise n -> infinity limit of the Weyl integrand.
inline double weyl_limit_integrand(Complex z) {
    const double t = std::norm(z);
    const double e = std::exp(-t);
    const double x = z.real();
    return std::exp(-e) * e *
           (std::exp(0.5 * t) * std::exp(-x * x * e) + detail::kSqrtPi * x * lemni::erf(x * std::exp(-0.5 * t)));
}

/// Limit of E|Lambda_n| for the Weyl ensemble.
inline LengthEstimate weyl_limit_constant(const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const double scale = 4.0 * detail::kSqrtPi;
    constexpr double kCut = 12.0;
    auto row = [](double r, std::span<const double> thetas, std::span<double> out) {
        for (std::size_t j = 0; j < thetas.size(); ++j) out[j] = weyl_limit_integrand(std::polar(r, thetas[j])) * r;
    };
    const std::array<double, 10> rb = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, kCut};
    const std::array<double, 3> thb = {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0};
    const auto q = integrate_2d(row, rb, thb, 0.5 * cfg.abs_tolerance / scale, cfg.max_depth);
    // integrand <= e^{-r^2/2} + sqrt(pi) r e^{-r^2}; integrate 2 pi r * bound over [R, inf)
    const double R = kCut;
    const double tail = detail::kSqrtPi * 2.0 * std::numbers::pi *
                        (std::exp(-0.5 * R * R) + detail::kSqrtPi * (0.5 * R + 0.25 / R) * std::exp(-R * R));
    const double err = scale * q.error + tail;
    return {scale * q.value, err, q.panels, err <= cfg.abs_tolerance};
}

/// n (coth s - 1/s): asymptotic number of Kac zeros in e^{-s/n} < |z| < e^{s/n}.
inline double annulus_zero_count_reference(int n, double s) {
    if (!(s > 0.0)) throw InvalidArgument("s must be positive");
    double g;
    if (s < 1e-3) {
        g = s / 3.0 - s * s * s / 45.0;
    } else {
        g = 1.0 / std::tanh(s) - 1.0 / s;
    }
    return static_cast<double>(n) * g;
}

/// Exact expected number of zeros in |z| < r for independent coefficients:
/// t a'(t) / a(t) with t = r^2 and a(t) = sum sigma_k^2 t^k.
inline double expected_zeros_in_disk(const EnsembleSpec& spec, double r) {
    if (!(r > 0.0)) return 0.0;
    const auto lw = detail::log_variance_weights(spec);
    std::vector<double> lk(lw.size(), detail::kNegInf);
    for (std::size_t k = 1; k < lw.size(); ++k) lk[k] = lw[k] + std::log(static_cast<double>(k));
    const double log_t = 2.0 * std::log(r);
    return std::exp(detail::log_series(lk, log_t) - detail::log_series(lw, log_t));
}

inline double expected_zeros_in_annulus(const EnsembleSpec& spec, double r_inner, double r_outer) {
    return expected_zeros_in_disk(spec, r_outer) - expected_zeros_in_disk(spec, r_inner);
}

}  // namespace lemni
