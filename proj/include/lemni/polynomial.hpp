#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "lemni/error.hpp"

namespace lemni {

using Complex = std::complex<double>;

/// p, p', p'' at a point, all multiplied by a common factor exp(-log_scale).
///
/// Outside the unit disk the polynomial is evaluated through its reversal in
/// 1/z, so the jet stays finite even when |p(z)| itself would overflow. Only
/// ratios and log|p| are meaningful to callers.
struct ScaledJet {
    Complex value;
    Complex first;
    Complex second;
    double log_scale = 0.0;

    double log_abs() const { return std::log(std::abs(value)) + log_scale; }
    /// p'/p, i.e. the derivative of log p.
    Complex log_derivative() const { return first / value; }
};

class ComplexPolynomial {
public:
    ComplexPolynomial() : coefficients_{Complex{0.0, 0.0}} {}

    /// Coefficients in ascending order c_0..c_n; trailing zeros are kept so the
    /// nominal degree survives (a zero leading coefficient is a degenerate sample).
    explicit ComplexPolynomial(std::vector<Complex> coefficients) : coefficients_(std::move(coefficients)) {
        if (coefficients_.empty()) throw InvalidArgument("polynomial needs at least one coefficient");
    }

    int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
    std::span<const Complex> coefficients() const { return coefficients_; }
    Complex coefficient(int k) const { return coefficients_.at(static_cast<std::size_t>(k)); }
    Complex leading() const { return coefficients_.back(); }

    Complex operator()(Complex z) const { return evaluate(z, 0); }

    /// k-th derivative by Horner on the differentiated coefficient sequence.
    Complex evaluate(Complex z, int derivative_order = 0) const {
        const int n = degree();
        if (derivative_order < 0) throw InvalidArgument("derivative order must be nonnegative");
        if (derivative_order > n) return {0.0, 0.0};
        const int k = derivative_order;
        Complex acc{0.0, 0.0};
        for (int j = n; j >= k; --j) {
            double falling = 1.0;
            for (int i = 0; i < k; ++i) falling *= static_cast<double>(j - i);
            acc = acc * z + coefficients_[static_cast<std::size_t>(j)] * falling;
        }
        return acc;
    }

    ScaledJet jet(Complex z) const {
        const int n = degree();
        if (std::abs(z) <= 1.0) {
            Complex p = coefficients_.back(), d1{0.0, 0.0}, d2{0.0, 0.0};
            for (int j = n - 1; j >= 0; --j) {
                d2 = d2 * z + 2.0 * d1;
                d1 = d1 * z + p;
                p = p * z + coefficients_[static_cast<std::size_t>(j)];
            }
            return {p, d1, d2, 0.0};
        }
        // q(w) = sum c_k w^(n-k) = w^n p(1/w)
        const Complex w = 1.0 / z;
        Complex q = coefficients_.front(), q1{0.0, 0.0}, q2{0.0, 0.0};
        for (int j = 1; j <= n; ++j) {
            q2 = q2 * w + 2.0 * q1;
            q1 = q1 * w + q;
            q = q * w + coefficients_[static_cast<std::size_t>(j)];
        }
        const double nn = static_cast<double>(n);
        const Complex w2 = w * w;
        ScaledJet out;
        out.value = q;
        out.first = nn * w * q - w2 * q1;
        out.second = nn * (nn - 1.0) * w2 * q - 2.0 * (nn - 1.0) * w2 * w * q1 + w2 * w2 * q2;
        out.log_scale = nn * std::log(std::abs(z));
        return out;
    }

    /// log|p(z)|; finite wherever p(z) != 0, including far outside the unit disk.
    double log_abs(Complex z) const {
        const int n = degree();
        if (std::abs(z) <= 1.0) {
            Complex acc = coefficients_.back();
            for (int j = n - 1; j >= 0; --j) acc = acc * z + coefficients_[static_cast<std::size_t>(j)];
            return std::log(std::abs(acc));
        }
        const Complex w = 1.0 / z;
        Complex acc = coefficients_.front();
        for (int j = 1; j <= n; ++j) acc = acc * w + coefficients_[static_cast<std::size_t>(j)];
        return std::log(std::abs(acc)) + static_cast<double>(n) * std::log(std::abs(z));
    }

private:
    std::vector<Complex> coefficients_;
};

/// Multiplies coefficient k by e^{ik theta}, so |rotated(z)| = |p(e^{i theta} z)|.
inline ComplexPolynomial rotate_coefficients(const ComplexPolynomial& p, double theta) {
    std::vector<Complex> rotated(p.coefficients().begin(), p.coefficients().end());
    for (std::size_t k = 1; k < rotated.size(); ++k) rotated[k] *= std::polar(1.0, static_cast<double>(k) * theta);
    return ComplexPolynomial(std::move(rotated));
}

}  // namespace lemni
