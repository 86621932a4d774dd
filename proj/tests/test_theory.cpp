#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lemni/ensembles.hpp"
#include "lemni/rng.hpp"
#include "lemni/special.hpp"
#include "lemni/theory.hpp"

using namespace lemni;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// Maclaurin series in long double; converges fast for |x| <= 3.
double erf_series(double x) {
    long double term = x, sum = x;
    const long double x2 = static_cast<long double>(x) * x;
    for (int k = 1; k < 200; ++k) {
        term *= -x2 / k;
        sum += term / (2 * k + 1);
    }
    return static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
}

// Integrand assembled directly from brute-force kernel sums.
double brute_integrand(const std::vector<double>& w, Complex z) {
    const double t = std::norm(z);
    double a = 0.0, c = 0.0;
    Complex b{0.0, 0.0};
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double kk = static_cast<double>(k);
        a += w[k] * std::pow(t, kk);
        if (k >= 1) {
            b += std::conj(z) * w[k] * kk * std::pow(t, kk - 1.0);
            c += w[k] * kk * kk * std::pow(t, kk - 1.0);
        }
    }
    const double det = a * c - std::norm(b);
    const double rb = std::abs(b.real());
    return std::exp(-1.0 / a) / a *
           (std::sqrt(det / a) * std::exp(-rb * rb / (a * det)) +
            kSqrtPi * rb / a * std::erf(rb / std::sqrt(a * det)));
}

double agm(double a, double b) {
    while (std::abs(a - b) > 1e-16 * a) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return a;
}

}  // namespace

TEST_CASE("erf against a high-precision series") {
    CHECK(lemni::erf(0.0) == 0.0);
    CHECK_THAT(lemni::erf(6.0), WithinAbs(1.0, 1e-13));
    CHECK_THAT(lemni::erf(1.0), WithinAbs(0.8427007929497149, 1e-15));
    for (double x : {0.01, 0.3, 0.9, 1.0, 1.7, 2.4, 3.0}) {
        CHECK_THAT(lemni::erf(x), WithinAbs(erf_series(x), 1e-13));
        CHECK(lemni::erf(-x) == -lemni::erf(x));
    }
}

TEST_CASE("absolute real moment") {
    CHECK_THAT(abs_real_moment({0.0, 0.0}, 1.0), WithinAbs(1.0 / kSqrtPi, 1e-13));
    CHECK_THAT(abs_real_moment({0.0, 0.0}, 2.5), WithinAbs(2.5 / kSqrtPi, 1e-13));
    CHECK(abs_real_moment({1.0, 5.0}, 1.0) == abs_real_moment({1.0, 0.0}, 1.0));
    CHECK_THAT(abs_real_moment({1.0, 0.0}, 1.0), WithinAbs(std::exp(-1.0) / kSqrtPi + erf_series(1.0), 1e-13));
    CHECK_THROWS_AS(abs_real_moment({1.0, 0.0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(abs_real_moment({1.0, 0.0}, -1.0), InvalidArgument);
    for (double m : {-3.0, -0.4, 0.0, 0.2, 1.0, 2.7}) {
        for (double s : {0.3, 1.0, 4.0}) {
            const double v = abs_real_moment({m, 0.0}, s);
            const double r = std::abs(m) / s;
            CHECK(v >= s / kSqrtPi * std::exp(-r * r));
            CHECK(v >= std::abs(m) * std::erf(r));
        }
    }
}

TEST_CASE("absolute real moment matches simulation") {
    // zeta ~ N_C(1, 1): Re zeta ~ N(1, 1/2)
    CounterRng rng(2024);
    constexpr int kPairs = 500000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < kPairs; ++i) {
        const auto [g, h] = rng.next_normal_pair();
        for (double v : {g, h}) {
            const double x = std::abs(1.0 + v / std::numbers::sqrt2);
            sum += x;
            sumsq += x * x;
        }
    }
    const double n = 2.0 * kPairs;
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - abs_real_moment({1.0, 0.0}, 1.0)) < 3.0 * se);
}

TEST_CASE("length integrand special values and symmetry") {
    CHECK_THAT(length_integrand(EnsembleSpec::kac(1), {0.0, 0.0}), WithinRel(std::exp(-1.0), 1e-14));
    for (auto spec : {EnsembleSpec::kac(12), EnsembleSpec::kostlan(12), EnsembleSpec::weyl(12),
                      EnsembleSpec::reciprocal_binomial(12)}) {
        for (Complex z : {Complex{0.3, 0.2}, Complex{-1.1, 0.5}, Complex{0.05, -2.0}}) {
            const double f = length_integrand(spec, z);
            CHECK(f >= 0.0);
            CHECK_THAT(length_integrand(spec, std::conj(z)), WithinRel(f, 1e-13));
            CHECK_THAT(length_integrand(spec, -std::conj(z)), WithinRel(f, 1e-13));
        }
    }
}

TEST_CASE("length integrand matches brute-force assembly") {
    const auto spec = EnsembleSpec::kac(30);
    const auto w = variance_weights(spec);
    CHECK_THAT(length_integrand(spec, {0.4, 0.3}), WithinRel(brute_integrand(w, {0.4, 0.3}), 1e-10));
    for (auto s : {EnsembleSpec::weyl(20), EnsembleSpec::kostlan(20), EnsembleSpec::reciprocal_binomial(20)}) {
        const auto ws = variance_weights(s);
        for (Complex z : {Complex{0.4, 0.3}, Complex{0.9, -0.8}, Complex{-1.5, 0.1}}) {
            CHECK_THAT(length_integrand(s, z), WithinRel(brute_integrand(ws, z), 1e-9));
        }
    }
}

TEST_CASE("integrands are nonnegative") {
    CounterRng rng(5);
    for (auto spec : {EnsembleSpec::kac(40), EnsembleSpec::kostlan(40), EnsembleSpec::weyl(40),
                      EnsembleSpec::reciprocal_binomial(40)}) {
        const LengthIntegrand f(spec);
        for (int i = 0; i < 500; ++i) {
            const Complex z = std::polar(4.0 * rng.next_open_unit(), 2.0 * std::numbers::pi * rng.next_open_unit());
            CHECK(f(z) >= 0.0);
            CHECK(kac_limit_integrand(z) >= 0.0);
            CHECK(weyl_limit_integrand(z) >= 0.0);
        }
    }
}

TEST_CASE("expected length of a degree-one Kac polynomial") {
    // |a0 + a1 z| = 1 is a circle of radius 1/|a1| about -a0/a1: E 2 pi / |a1| = 2 pi sqrt(pi)
    const auto e = expected_length(EnsembleSpec::kac(1));
    CHECK_THAT(e.value, WithinRel(2.0 * std::numbers::pi * kSqrtPi, 1e-7));
    CHECK(e.error_bound >= 0.0);
    CHECK(e.converged);
}

TEST_CASE("halving the tolerance stays within the reported errors") {
    for (auto spec : {EnsembleSpec::kac(25), EnsembleSpec::kostlan(25), EnsembleSpec::reciprocal_binomial(25)}) {
        QuadratureConfig coarse;
        coarse.abs_tolerance = 1e-5;
        QuadratureConfig fine;
        fine.abs_tolerance = 0.5e-5;
        const auto a = expected_length(spec, coarse);
        const auto b = expected_length(spec, fine);
        CHECK(a.value >= 0.0);
        CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
    }
}

TEST_CASE("fixed cutoff agrees with the compactified exterior") {
    QuadratureConfig cut;
    cut.fixed_cutoff = 6.0;
    const auto a = expected_length(EnsembleSpec::kac(15), cut);
    const auto b = expected_length(EnsembleSpec::kac(15));
    CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
}

TEST_CASE("Kac exterior contribution") {
    // Outside |z| > 2 by a midpoint rule in u = 2/r with brute-force kernels.
    auto brute_exterior = [](int n) {
        const auto w = variance_weights(EnsembleSpec::kac(n));
        constexpr int nu = 2000, nt = 200;
        double sum = 0.0;
        for (int i = 0; i < nu; ++i) {
            const double u = (i + 0.5) / nu;
            const double r = 2.0 / u;
            for (int j = 0; j < nt; ++j) {
                const double th = (j + 0.5) / nt * std::numbers::pi / 2.0;
                // dA = r dr dth, dr = 2/u^2 du
                sum += brute_integrand(w, std::polar(r, th)) * r * 2.0 / (u * u);
            }
        }
        return 4.0 * kSqrtPi * sum / nu / nt * std::numbers::pi / 2.0;
    };
    auto exterior = [](int n) {
        const auto spec = EnsembleSpec::kac(n);
        QuadratureConfig q;
        q.abs_tolerance = 1e-12;
        return expected_length(spec, q).value - expected_length_in_disk(spec, 2.0, q).value;
    };
    const double e10 = exterior(10);
    CHECK_THAT(e10, WithinRel(brute_exterior(10), 1e-3));
    CHECK(e10 > 1e-4);
    for (int n : {20, 30, 50}) {
        CHECK(exterior(n) < 1e-6);
        CHECK(exterior(n) > -1e-9);
    }
}

TEST_CASE("finite Kac lengths rise with degree") {
    double prev = 0.0;
    for (int n : {10, 25, 50, 100}) {
        const double v = expected_length(EnsembleSpec::kac(n)).value;
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev < kac_limit_constant().value);
}

TEST_CASE("Kac limit constant") {
    CHECK_THAT(kac_limit_integrand({0.0, 0.0}), WithinRel(std::exp(-1.0), 1e-14));
    CHECK(kac_limit_integrand({1.2, 0.0}) == 0.0);
    const auto c = kac_limit_constant();
    CHECK(c.converged);
    // midpoint rule in (phi, theta) with r = sin(phi); 10^7 cells over a quadrant
    constexpr int np = 3163, nt = 3163;
    double sum = 0.0;
    for (int i = 0; i < np; ++i) {
        const double phi = (i + 0.5) / np * std::numbers::pi / 2.0;
        const double r = std::sin(phi), cr = std::cos(phi);
        for (int j = 0; j < nt; ++j) {
            const double th = (j + 0.5) / nt * std::numbers::pi / 2.0;
            const double x = r * std::cos(th);
            const double w = cr * cr;
            // kac_limit_integrand * r dr with the 1/sqrt(w) factor cancelled by dr = cos(phi) dphi
            const double f = std::exp(-w) * (std::exp(-x * x * w) + kSqrtPi * x * std::erf(x * cr) * cr);
            sum += f * r;
        }
    }
    const double riemann = 4.0 * kSqrtPi * sum * (std::numbers::pi / 2.0 / np) * (std::numbers::pi / 2.0 / nt);
    CHECK_THAT(c.value, WithinAbs(riemann, 1e-3));
    CHECK_THAT(c.value, WithinAbs(8.80278418, 1e-6));
}

TEST_CASE("Kostlan limit constant") {
    for (double t : {0.1, 1.0, 5.0}) {
        for (double th : {0.2, 1.0, 1.4}) {
            CHECK_THAT(kostlan_limit_integrand(t, th), WithinRel(kostlan_limit_integrand(t, std::numbers::pi - th), 1e-14));
        }
    }
    const auto I = kostlan_limit_constant();
    CHECK(I.value > 0.0);
    CHECK(I.converged);
    const double scaled = 10.0 * expected_length(EnsembleSpec::kostlan(100)).value;
    CHECK_THAT(I.value, WithinRel(scaled, 0.05));
    const double s400 = 20.0 * expected_length(EnsembleSpec::kostlan(400)).value;
    CHECK_THAT(scaled, WithinRel(s400, 0.02));
}

TEST_CASE("Weyl limit constant") {
    CHECK_THAT(weyl_limit_integrand({0.0, 0.0}), WithinRel(std::exp(-1.0), 1e-14));
    CHECK_THAT(length_integrand(EnsembleSpec::weyl(150), {0.0, 0.0}), WithinRel(weyl_limit_integrand({0.0, 0.0}), 1e-12));
    const auto L = weyl_limit_constant();
    CHECK(L.value > 0.0);
    CHECK_THAT(L.value, WithinRel(expected_length(EnsembleSpec::weyl(50)).value, 0.03));
    // the Kostlan and Weyl limits are the same integral in different coordinates
    CHECK_THAT(L.value, WithinRel(kostlan_limit_constant().value, 1e-7));
}

TEST_CASE("Bernoulli lemniscate constant from the AGM") {
    const double varpi = std::numbers::pi / agm(1.0, std::numbers::sqrt2);
    CHECK_THAT(varpi, WithinAbs(2.62205755429212, 1e-12));
    CHECK_THAT(2.0 * std::numbers::sqrt2 * varpi, WithinAbs(7.41629870920, 1e-10));
}

TEST_CASE("annulus zero count reference") {
    CHECK_THAT(annulus_zero_count_reference(1, 50.0), WithinAbs(1.0 - 1.0 / 50.0, 1e-12));
    CHECK(annulus_zero_count_reference(1000, 1e-4) / 1000.0 < 1e-4);
    CHECK_THAT(annulus_zero_count_reference(200, 3.0), WithinRel(200.0 * (1.0 / std::tanh(3.0) - 1.0 / 3.0), 1e-14));
    CHECK_THROWS_AS(annulus_zero_count_reference(10, 0.0), InvalidArgument);
    // series branch meets the direct branch
    CHECK_THAT(annulus_zero_count_reference(1, 0.99e-3), WithinRel(1.0 / std::tanh(0.99e-3) - 1.0 / 0.99e-3, 1e-8));
}

TEST_CASE("expected zeros in a disk") {
    // Kac: t a'(t)/a(t) with a = (1 - t^(n+1))/(1 - t)
    const int n = 30;
    for (double r : {0.5, 0.9, 0.99, 1.05}) {
        const double t = r * r;
        double a = 0.0, da = 0.0;
        for (int k = 0; k <= n; ++k) {
            a += std::pow(t, k);
            da += k * std::pow(t, k);
        }
        CHECK_THAT(expected_zeros_in_disk(EnsembleSpec::kac(n), r), WithinRel(da / a, 1e-12));
    }
    CHECK_THAT(expected_zeros_in_disk(EnsembleSpec::kac(n), 1.0), WithinRel(n / 2.0, 1e-12));
    CHECK_THAT(expected_zeros_in_disk(EnsembleSpec::kac(n), 1e3), WithinAbs(n, 1e-3));
    // exact count approaches the asymptotic one as n grows
    const double s = 3.0;
    auto rel_gap = [s](int m) {
        const double exact = expected_zeros_in_annulus(EnsembleSpec::kac(m), std::exp(-s / m), std::exp(s / m));
        return std::abs(exact - annulus_zero_count_reference(m, s)) / m;
    };
    CHECK(rel_gap(800) < rel_gap(200));
    CHECK(rel_gap(200) < rel_gap(50));
}

TEST_CASE("quadrature config validation") {
    QuadratureConfig q;
    q.abs_tolerance = 0.0;
    CHECK_THROWS_AS(expected_length(EnsembleSpec::kac(5), q), InvalidArgument);
    q = {};
    q.max_depth = 2;
    CHECK_THROWS_AS(expected_length(EnsembleSpec::kac(5), q), InvalidArgument);
    CHECK_THROWS_AS(expected_length_in_disk(EnsembleSpec::kac(5), -1.0), InvalidArgument);
}
