#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "lemni/error.hpp"

namespace lemni {

/// Error function, odd symmetry exact by construction.
inline double erf(double x) {
    if (std::isnan(x)) return x;
    const double v = std::erf(std::fabs(x));
    return std::signbit(x) ? -v : v;
}

/// E|Re zeta| for zeta ~ N_C(mu, sigma^2):
///   sigma/sqrt(pi) exp(-mu1^2/sigma^2) + |mu1| erf(|mu1|/sigma).
inline double abs_real_moment(std::complex<double> mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive and finite");
    const double m = std::fabs(mu.real());
    const double ratio = m / sigma;
    return sigma / std::sqrt(std::numbers::pi) * std::exp(-ratio * ratio) + m * lemni::erf(ratio);
}

}  // namespace lemni
