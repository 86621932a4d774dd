#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemni/error.hpp"
#include "lemni/polynomial.hpp"
#include "lemni/rng.hpp"

namespace lemni {

enum class EnsembleKind { Kac, Kostlan, Weyl, ReciprocalBinomial, Custom };

inline std::string_view to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Kac: return "kac";
        case EnsembleKind::Kostlan: return "kostlan";
        case EnsembleKind::Weyl: return "weyl";
        case EnsembleKind::ReciprocalBinomial: return "recip_binom";
        case EnsembleKind::Custom: return "custom";
    }
    return "unknown";
}

inline EnsembleKind parse_ensemble_kind(std::string_view name) {
    if (name == "kac") return EnsembleKind::Kac;
    if (name == "kostlan") return EnsembleKind::Kostlan;
    if (name == "weyl") return EnsembleKind::Weyl;
    if (name == "recip_binom") return EnsembleKind::ReciprocalBinomial;
    if (name == "custom") return EnsembleKind::Custom;
    throw InvalidSpec("unknown ensemble '" + std::string(name) + "'");
}

/// A Gaussian coefficient model: c_k ~ N_C(0, sigma_k^2) independently.
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Kac;
    int degree = 1;
    std::optional<std::vector<double>> custom_weights;

    static EnsembleSpec kac(int n) { return {EnsembleKind::Kac, n, std::nullopt}; }
    static EnsembleSpec kostlan(int n) { return {EnsembleKind::Kostlan, n, std::nullopt}; }
    static EnsembleSpec weyl(int n) { return {EnsembleKind::Weyl, n, std::nullopt}; }
    static EnsembleSpec reciprocal_binomial(int n) { return {EnsembleKind::ReciprocalBinomial, n, std::nullopt}; }
    static EnsembleSpec custom(std::vector<double> weights) {
        const int n = static_cast<int>(weights.size()) - 1;
        return {EnsembleKind::Custom, n, std::move(weights)};
    }

    EnsembleSpec with_degree(int n) const {
        EnsembleSpec copy = *this;
        copy.degree = n;
        return copy;
    }

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

namespace detail {

inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log sigma_k^2 for k = 0..n. Exact products for small n, lgamma beyond 60.
inline std::vector<double> log_variance_weights(const EnsembleSpec& spec) {
    const int n = spec.degree;
    if (n < 1) throw InvalidSpec("degree must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    auto log_binom = [n](int k) {
        if (n > 60) return log_binomial(n, k);
        double c = 1.0;
        for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
        return std::log(c);
    };
    switch (spec.kind) {
        case EnsembleKind::Kac:
            std::fill(out.begin(), out.end(), 0.0);
            break;
        case EnsembleKind::Kostlan:
            for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = log_binom(k);
            break;
        case EnsembleKind::ReciprocalBinomial:
            for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = -log_binom(k);
            break;
        case EnsembleKind::Weyl:
            for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = -std::lgamma(k + 1.0);
            break;
        case EnsembleKind::Custom: {
            if (!spec.custom_weights) throw InvalidSpec("custom ensemble requires weights");
            const auto& w = *spec.custom_weights;
            if (static_cast<int>(w.size()) != n + 1)
                throw InvalidSpec("custom ensemble needs degree+1 weights");
            for (int k = 0; k <= n; ++k) {
                const double v = w[static_cast<std::size_t>(k)];
                if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpec("custom weights must be positive and finite");
                out[static_cast<std::size_t>(k)] = std::log(v);
            }
            break;
        }
    }
    return out;
}

inline double falling_factorial(int j, int k) {
    double f = 1.0;
    for (int i = 0; i < k; ++i) f *= static_cast<double>(j - i);
    return f;
}

/// log(sum_m exp(log_coeff[m] + m * log_t)) over the finite coefficients.
inline double log_series(const std::vector<double>& log_coeff, double log_t) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < log_coeff.size(); ++m) {
        const double lc = log_coeff[m];
        if (lc == -std::numeric_limits<double>::infinity()) continue;
        const double term = m == 0 ? lc : lc + static_cast<double>(m) * log_t;
        peak = std::max(peak, term);
    }
    if (peak == -std::numeric_limits<double>::infinity()) return peak;
    double sum = 0.0;
    for (std::size_t m = 0; m < log_coeff.size(); ++m) {
        const double lc = log_coeff[m];
        if (lc == -std::numeric_limits<double>::infinity()) continue;
        const double term = m == 0 ? lc : lc + static_cast<double>(m) * log_t;
        sum += std::exp(term - peak);
    }
    return peak + std::log(sum);
}

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace detail

/// [sigma_0^2, ..., sigma_n^2]. Throws InvalidSpec when a weight is not a
/// positive finite double (e.g. Weyl beyond n = 170).
inline std::vector<double> variance_weights(const EnsembleSpec& spec) {
    const auto logs = detail::log_variance_weights(spec);
    std::vector<double> out(logs.size());
    for (std::size_t k = 0; k < logs.size(); ++k) {
        out[k] = std::exp(logs[k]);
        if (!(out[k] > 0.0) || !std::isfinite(out[k]))
            throw InvalidSpec("variance weight " + std::to_string(k) + " is not representable as a double");
    }
    if (spec.kind == EnsembleKind::Custom) out = *spec.custom_weights;
    return out;
}

/// Draws c_k = sqrt(sigma_k^2 / 2) (g + i h) with (g, h) one Box-Muller pair,
/// real part first, coefficients in ascending order.
inline ComplexPolynomial sample(const EnsembleSpec& spec, std::uint64_t seed) {
    const auto weights = variance_weights(spec);
    CounterRng rng(seed);
    std::vector<Complex> coefficients(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto [re, im] = rng.next_normal_pair();
        const double scale = std::sqrt(weights[k] / 2.0);
        coefficients[k] = {scale * re, scale * im};
    }
    return ComplexPolynomial(std::move(coefficients));
}

/// Covariance data of (p(z), p^(k)(z)).
struct KernelEntries {
    double a = 0.0;
    Complex b;
    double c = 0.0;
    int order = 1;
    double determinant = 0.0;
};

/// Same entries in log form: b = conj(z)^k * exp(log_b_modulus) * (phase of conj(z)^k).
struct LogKernelEntries {
    double log_a;
    double log_b;  // log |b_k|
    double log_c;
    double log_det;
};

/// Precomputed series for the covariance kernel of one ensemble and one
/// derivative order k. All sums are in t = |z|^2 with positive coefficients;
/// the determinant a c_k - |b_k|^2 is expanded as
///   1/2 sum_{i,j} s_i s_j (i^(k) - j^(k))^2 t^(i+j-k)
/// so it never suffers cancellation near |z| = 1.
class KernelSeries {
public:
    KernelSeries(const EnsembleSpec& spec, int order) : spec_(spec), order_(order) {
        const int n = spec.degree;
        if (order < 1 || order > n) throw InvalidArgument("derivative order must satisfy 1 <= k <= degree");
        log_w_ = detail::log_variance_weights(spec);
        const double ninf = -std::numeric_limits<double>::infinity();
        const int k = order;
        log_b_.assign(static_cast<std::size_t>(n - k) + 1, ninf);
        log_c_.assign(static_cast<std::size_t>(n - k) + 1, ninf);
        for (int j = k; j <= n; ++j) {
            const double ff = std::log(detail::falling_factorial(j, k));
            log_b_[static_cast<std::size_t>(j - k)] = log_w_[static_cast<std::size_t>(j)] + ff;
            log_c_[static_cast<std::size_t>(j - k)] = log_w_[static_cast<std::size_t>(j)] + 2.0 * ff;
        }
        // powers i + j - k range over [0, 2n - k]
        log_det_.assign(static_cast<std::size_t>(2 * n - k) + 1, ninf);
        for (int i = 0; i <= n; ++i) {
            const double fi = i >= k ? detail::falling_factorial(i, k) : 0.0;
            for (int j = std::max(i + 1, k - i); j <= n; ++j) {
                const double fj = j >= k ? detail::falling_factorial(j, k) : 0.0;
                const double diff = fj - fi;
                if (diff == 0.0) continue;
                // pair (i,j) and (j,i) together cancel the 1/2
                const double term = log_w_[static_cast<std::size_t>(i)] + log_w_[static_cast<std::size_t>(j)] +
                                    2.0 * std::log(std::abs(diff));
                auto& slot = log_det_[static_cast<std::size_t>(i + j - k)];
                slot = detail::log_sum_exp(slot, term);
            }
        }
    }

    const EnsembleSpec& spec() const { return spec_; }
    int order() const { return order_; }

    LogKernelEntries log_entries(double modulus) const {
        const double log_t = 2.0 * std::log(modulus);
        const int n = spec_.degree;
        const int k = order_;
        if (spec_.kind == EnsembleKind::Kostlan && k == 1) {
            const double l1 = std::log1p(modulus * modulus);
            const double nn = static_cast<double>(n);
            return {nn * l1, std::log(nn) + std::log(modulus) + (nn - 1.0) * l1,
                    std::log(nn) + std::log1p(nn * modulus * modulus) + (nn - 2.0) * l1,
                    std::log(nn) + (2.0 * nn - 2.0) * l1};
        }
        LogKernelEntries out{};
        out.log_a = detail::log_series(log_w_, log_t);
        out.log_b = static_cast<double>(k) * std::log(modulus) + detail::log_series(log_b_, log_t);
        out.log_c = detail::log_series(log_c_, log_t);
        out.log_det = detail::log_series(log_det_, log_t);
        return out;
    }

    KernelEntries entries(Complex z) const {
        const auto l = log_entries(std::abs(z));
        KernelEntries out;
        out.order = order_;
        out.a = std::exp(l.log_a);
        out.c = std::exp(l.log_c);
        out.determinant = std::exp(l.log_det);
        const Complex zbar_k = std::pow(std::conj(z), order_);
        const double zk = std::abs(zbar_k);
        out.b = zk > 0.0 ? zbar_k / zk * std::exp(l.log_b) : Complex{0.0, 0.0};
        return out;
    }

private:
    EnsembleSpec spec_;
    int order_;
    std::vector<double> log_w_;
    std::vector<double> log_b_;
    std::vector<double> log_c_;
    std::vector<double> log_det_;
};

/// a = K(z,z), b_k = d^k/dz^k K(z,z), c_k = d^k/dz^k d^k/dzbar^k K(z,z).
inline KernelEntries kernel_entries(const EnsembleSpec& spec, Complex z, int k = 1) {
    return KernelSeries(spec, k).entries(z);
}

/// Variance of p^(k)(z) conditioned on p(z) = 0: (a c_k - |b_k|^2) / a.
inline double conditional_variance(const EnsembleSpec& spec, Complex z, int k = 1) {
    const auto l = KernelSeries(spec, k).log_entries(std::abs(z));
    return std::exp(l.log_det - l.log_a);
}

}  // namespace lemni
